//! Percentile, bias-corrected and bias-corrected-accelerated intervals.
//!
//! All three share one rank rule so that BCa with zero acceleration is BC,
//! and BC with zero bias is the percentile interval, endpoint for endpoint.

use crate::error::{Error, Result};
use crate::normal::{normal_cdf, normal_quantile};
use crate::types::{ConfidenceInterval, Method};

/// Slack applied before `ceil`/`floor` so that `0.025 * 1000` lands on rank 25.
const RANK_EPS: f64 = 1e-9;

fn check(values: &[f64], alpha: f64) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidInput("empty bootstrap distribution".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

pub(crate) fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

/// Bias-correction constant `z₀` from an ascending-sorted distribution.
pub(crate) fn bias_correction_sorted(sorted: &[f64], point: f64) -> f64 {
    let b = sorted.len() as f64;
    let below = sorted.partition_point(|&v| v < point);
    let not_above = sorted.partition_point(|&v| v <= point);
    let ties = not_above - below;
    let p = (below as f64 + 0.5 * ties as f64) / b;
    let floor = 0.5 / b;
    let p = p.clamp(floor, 1.0 - floor);
    if p == 0.5 {
        return 0.0;
    }
    normal_quantile(p).expect("clamped proportion lies in (0, 1)")
}

/// `z₀ = Φ⁻¹(p)` where `p` is the share of `values` below `point`, ties
/// counted half, clamped to `[1/(2B), 1 − 1/(2B)]`.
pub fn bias_correction(values: &[f64], point: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidInput("empty bootstrap distribution".into()));
    }
    Ok(bias_correction_sorted(&sorted(values), point))
}

/// Adjusted lower/upper tail probabilities for bias `z0` and acceleration `accel`.
pub(crate) fn tail_probabilities(z0: f64, accel: f64, alpha: f64, b: usize) -> (f64, f64) {
    let lo = alpha / 2.0;
    let hi = 1.0 - alpha / 2.0;
    if z0 == 0.0 && accel == 0.0 {
        return (lo, hi);
    }
    let floor = 0.5 / b as f64;
    let adjust = |tail: f64| {
        let zt = normal_quantile(tail).expect("alpha checked");
        let w = z0 + zt;
        let denom = 1.0 - accel * w;
        if denom <= 0.0 {
            if w > 0.0 {
                1.0 - floor
            } else {
                floor
            }
        } else {
            normal_cdf(z0 + w / denom)
        }
    };
    (adjust(lo), adjust(hi))
}

/// 1-based ranks `max(1, ⌈p_lo·B⌉)` and `min(B, ⌊p_hi·B⌋)`, ordered.
pub(crate) fn ranks(p_lo: f64, p_hi: f64, b: usize) -> (usize, usize) {
    let bf = b as f64;
    let lower = ((p_lo * bf - RANK_EPS).ceil().max(1.0) as usize).min(b);
    let upper = ((p_hi * bf + RANK_EPS).floor().max(1.0) as usize).min(b);
    if lower <= upper {
        (lower, upper)
    } else {
        (upper, lower)
    }
}

pub(crate) fn interval_sorted(
    sorted: &[f64],
    z0: f64,
    accel: f64,
    alpha: f64,
    method: Method,
) -> ConfidenceInterval {
    let (p_lo, p_hi) = tail_probabilities(z0, accel, alpha, sorted.len());
    let (lo, hi) = ranks(p_lo, p_hi, sorted.len());
    ConfidenceInterval {
        lower: sorted[lo - 1],
        upper: sorted[hi - 1],
        method,
        alpha,
    }
}

pub fn ci_percentile(values: &[f64], alpha: f64) -> Result<ConfidenceInterval> {
    check(values, alpha)?;
    Ok(interval_sorted(&sorted(values), 0.0, 0.0, alpha, Method::Percentile))
}

pub fn ci_bc(values: &[f64], point: f64, alpha: f64) -> Result<ConfidenceInterval> {
    check(values, alpha)?;
    let s = sorted(values);
    let z0 = bias_correction_sorted(&s, point);
    Ok(interval_sorted(&s, z0, 0.0, alpha, Method::BiasCorrected))
}

/// BC interval with an externally supplied `z0`.
pub fn ci_bc_with_bias(values: &[f64], z0: f64, alpha: f64) -> Result<ConfidenceInterval> {
    check(values, alpha)?;
    Ok(interval_sorted(&sorted(values), z0, 0.0, alpha, Method::BiasCorrected))
}

pub fn ci_bca(values: &[f64], point: f64, accel: f64, alpha: f64) -> Result<ConfidenceInterval> {
    check(values, alpha)?;
    if !accel.is_finite() {
        return Err(Error::InvalidInput(format!("acceleration must be finite, got {accel}")));
    }
    let s = sorted(values);
    let z0 = bias_correction_sorted(&s, point);
    Ok(interval_sorted(&s, z0, accel, alpha, Method::BiasCorrectedAccelerated))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one_to(n: usize) -> Vec<f64> {
        (1..=n).map(|v| v as f64).collect()
    }

    #[test]
    fn bias_correction_examples() {
        let v = one_to(1000);
        assert_eq!(bias_correction(&v, 500.5).unwrap(), 0.0);
        let z = bias_correction(&v, 600.5).unwrap();
        assert!((z - 0.253_347_103_135_799_8).abs() < 1e-12);
        let z = bias_correction(&v, 5000.0).unwrap();
        assert!((z - 3.290_526_731_491_894_8).abs() < 1e-12);
        let z = bias_correction(&v, -5.0).unwrap();
        assert!((z + 3.290_526_731_491_894_8).abs() < 1e-12);
    }

    #[test]
    fn ties_count_half() {
        // 2 below, 2 tied, 2 above: exactly half below.
        let v = [1.0, 2.0, 3.0, 3.0, 4.0, 5.0];
        assert_eq!(bias_correction(&v, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn percentile_examples() {
        let v = one_to(1000);
        let ci = ci_percentile(&v, 0.05).unwrap();
        assert_eq!((ci.lower, ci.upper), (25.0, 975.0));
        let ci = ci_percentile(&v, 0.5).unwrap();
        assert_eq!((ci.lower, ci.upper), (250.0, 750.0));
        let ci = ci_percentile(&[7.0; 50], 0.05).unwrap();
        assert_eq!((ci.lower, ci.upper), (7.0, 7.0));
    }

    #[test]
    fn bc_reference_example() {
        // Independent evaluation: z0 = Φ⁻¹(0.6), α₁ = Φ(2z0 − 1.95996) = 0.073074,
        // α₂ = Φ(2z0 + 1.95996) = 0.993181, ranks ⌈73.07⌉ = 74 and ⌊993.18⌋ = 993.
        let v = one_to(1000);
        let z0 = bias_correction(&v, 600.5).unwrap();
        let (p1, p2) = tail_probabilities(z0, 0.0, 0.05, 1000);
        assert!((p1 - 0.073_074_432_445_327_5).abs() < 1e-9);
        assert!((p2 - 0.993_180_976_339_386).abs() < 1e-9);
        let ci = ci_bc(&v, 600.5, 0.05).unwrap();
        assert_eq!((ci.lower, ci.upper), (74.0, 993.0));
    }

    #[test]
    fn bca_reference_example() {
        // Independent evaluation with accel = −18/(6·14^1.5):
        // α₁ = 0.0506962 (rank 51), α₂ = 0.9867112 (rank 986).
        let v = one_to(1000);
        let accel = -18.0 / (6.0 * 14f64.powf(1.5));
        let z0 = bias_correction(&v, 600.5).unwrap();
        let (p1, p2) = tail_probabilities(z0, accel, 0.05, 1000);
        assert!((p1 - 0.050_696_164_516_707_4).abs() < 1e-9);
        assert!((p2 - 0.986_711_228_888_002).abs() < 1e-9);
        let ci = ci_bca(&v, 600.5, accel, 0.05).unwrap();
        assert_eq!((ci.lower, ci.upper), (51.0, 986.0));
    }

    #[test]
    fn point_below_everything_pushes_to_low_ranks() {
        let v = one_to(1000);
        let ci = ci_bc(&v, -1.0, 0.05).unwrap();
        // 2z0 = −6.58 dominates: both tails far into the left.
        assert_eq!(ci.lower, 1.0);
        assert!(ci.upper <= 10.0, "{ci:?}");
    }

    #[test]
    fn extreme_acceleration_clamps() {
        let v = one_to(1000);
        let ci = ci_bca(&v, 500.5, 0.9, 0.05).unwrap();
        assert!(ci.lower <= ci.upper);
        assert_eq!(ci.upper, 999.0);
        let ci = ci_bca(&v, 500.5, -0.9, 0.05).unwrap();
        assert!(ci.lower <= ci.upper);
        assert_eq!(ci.lower, 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ci_percentile(&[], 0.05).is_err());
        assert!(ci_percentile(&[1.0, 2.0], 0.0).is_err());
        assert!(ci_bca(&[1.0, 2.0], 1.0, f64::NAN, 0.05).is_err());
    }

    fn values() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, 2..300)
    }

    proptest! {
        #[test]
        fn nesting_chain(v in values(), point in -10.0f64..10.0, alpha in 0.001f64..0.5) {
            let bc = ci_bc(&v, point, alpha).unwrap();
            let bca = ci_bca(&v, point, 0.0, alpha).unwrap();
            prop_assert_eq!((bc.lower, bc.upper), (bca.lower, bca.upper));
            let per = ci_percentile(&v, alpha).unwrap();
            let forced = ci_bc_with_bias(&v, 0.0, alpha).unwrap();
            prop_assert_eq!((per.lower, per.upper), (forced.lower, forced.upper));
        }

        #[test]
        fn ordered_endpoints(v in values(), point in -12.0f64..12.0, accel in -0.5f64..0.5, alpha in 0.001f64..0.9) {
            for ci in [
                ci_percentile(&v, alpha).unwrap(),
                ci_bc(&v, point, alpha).unwrap(),
                ci_bca(&v, point, accel, alpha).unwrap(),
            ] {
                prop_assert!(ci.lower <= ci.upper);
            }
        }

        #[test]
        fn permutation_invariant(v in values(), point in -10.0f64..10.0, accel in -0.3f64..0.3) {
            let mut r = v.clone();
            r.reverse();
            r.rotate_left(v.len() / 3);
            prop_assert_eq!(ci_percentile(&v, 0.05).unwrap(), ci_percentile(&r, 0.05).unwrap());
            prop_assert_eq!(ci_bc(&v, point, 0.05).unwrap(), ci_bc(&r, point, 0.05).unwrap());
            prop_assert_eq!(ci_bca(&v, point, accel, 0.05).unwrap(), ci_bca(&r, point, accel, 0.05).unwrap());
        }

        #[test]
        fn translation_equivariant(v in prop::collection::vec(-64i32..64, 2..200), point in -64i32..64, k in -32i32..32) {
            // Quarter-integer lattice keeps the shift exact in floating point.
            let v: Vec<f64> = v.into_iter().map(|x| x as f64 / 4.0).collect();
            let point = point as f64 / 4.0 + 0.125;
            let k = k as f64 / 4.0;
            let shifted: Vec<f64> = v.iter().map(|x| x + k).collect();
            let a = ci_bca(&v, point, 0.05, 0.05).unwrap();
            let b = ci_bca(&shifted, point + k, 0.05, 0.05).unwrap();
            prop_assert_eq!(b.lower, a.lower + k);
            prop_assert_eq!(b.upper, a.upper + k);
            let a = ci_bc(&v, point, 0.05).unwrap();
            let b = ci_bc(&shifted, point + k, 0.05).unwrap();
            prop_assert_eq!((b.lower, b.upper), (a.lower + k, a.upper + k));
        }
    }
}
