use crate::error::{Error, Result};
use crate::regress::Moments;
use crate::types::{Dataset, Path, PathEstimates};

/// Leave-one-out path estimates; entry `i` omits row `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct JackknifeSet {
    pub estimates: Vec<PathEstimates>,
}

impl JackknifeSet {
    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }

    pub fn path(&self, path: Path) -> Vec<f64> {
        self.estimates.iter().map(|e| e.get(path)).collect()
    }
}

/// All `n` leave-one-out fits.
///
/// Rather than refitting `n` times, each omitted row is removed from the
/// full-sample centered cross-products:
/// `S'_uv = S_uv − u_i·v_i·n/(n−1)` with `u, v` centered at the full means.
pub fn jackknife_estimates(d: &Dataset) -> Result<JackknifeSet> {
    let n = d.len();
    if n < 5 {
        return Err(Error::InvalidInput(format!(
            "jackknife needs at least 5 rows, got {n}"
        )));
    }
    let full = Moments::from_rows(n, |i| d.row(i));
    let rest = (n - 1) as f64;
    let inflate = 1.0 + 1.0 / rest;
    let estimates = (0..n)
        .map(|i| {
            let (x, m, y) = d.row(i);
            let (u, v, w) = (x - full.mean_x, m - full.mean_m, y - full.mean_y);
            Moments {
                n: rest,
                mean_x: full.mean_x - u / rest,
                mean_m: full.mean_m - v / rest,
                mean_y: full.mean_y - w / rest,
                sxx: full.sxx - u * u * inflate,
                sxm: full.sxm - u * v * inflate,
                sxy: full.sxy - u * w * inflate,
                smm: full.smm - v * v * inflate,
                smy: full.smy - v * w * inflate,
            }
            .paths()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(JackknifeSet { estimates })
}

/// Acceleration constant from leave-one-out values:
/// `Σd³ / (6·(Σd²)^{3/2})` with `d_i = mean − jack_i`; zero when `Σd² = 0`.
pub fn acceleration(jack: &[f64]) -> f64 {
    if jack.is_empty() {
        return 0.0;
    }
    let mean = jack.iter().sum::<f64>() / jack.len() as f64;
    let (mut s2, mut s3) = (0.0, 0.0);
    for &j in jack {
        let d = mean - j;
        s2 += d * d;
        s3 += d * d * d;
    }
    if s2 == 0.0 {
        return 0.0;
    }
    s3 / (6.0 * s2.powf(1.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regress::estimate_paths;
    use crate::oracle;
    use proptest::prelude::*;

    fn toy() -> Dataset {
        Dataset::new(
            vec![0.2, 1.4, 2.1, 0.7, 1.9, 3.3],
            vec![1.1, 0.3, 2.6, 1.8, 0.4, 2.2],
            vec![0.5, 1.7, 2.9, 0.1, 1.2, 3.8],
        )
        .unwrap()
    }

    #[test]
    fn length_matches_rows() {
        assert_eq!(jackknife_estimates(&toy()).unwrap().len(), 6);
    }

    #[test]
    fn toy_matches_brute_force_refits() {
        let d = toy();
        let fast = jackknife_estimates(&d).unwrap();
        let slow = oracle::jackknife_by_refit(&d).unwrap();
        for (f, s) in fast.estimates.iter().zip(&slow) {
            for p in Path::ALL {
                assert!((f.get(p) - s[p.index()]).abs() < 1e-10, "{p}: {} vs {}", f.get(p), s[p.index()]);
            }
        }
    }

    #[test]
    fn dropping_a_duplicated_row() {
        let mut x = toy().x().to_vec();
        let mut m = toy().m().to_vec();
        let mut y = toy().y().to_vec();
        x.push(x[2]);
        m.push(m[2]);
        y.push(y[2]);
        let d = Dataset::new(x, m, y).unwrap();
        let jack = jackknife_estimates(&d).unwrap();
        let direct = estimate_paths(&toy()).unwrap();
        for p in Path::ALL {
            assert!((jack.estimates[6].get(p) - direct.get(p)).abs() < 1e-10);
            assert!((jack.estimates[2].get(p) - direct.get(p)).abs() < 1e-10);
        }
    }

    #[test]
    fn too_few_rows() {
        let d = Dataset::new(vec![1.0, 2.0, 3.0, 4.0], vec![2.0, 1.0, 4.0, 3.0], vec![0.0; 4]).unwrap();
        assert!(jackknife_estimates(&d).is_err());
    }

    #[test]
    fn singular_leave_one_out() {
        // x is constant once row 0 is removed.
        let d = Dataset::new(
            vec![9.0, 1.0, 1.0, 1.0, 1.0],
            vec![1.0, 2.0, 0.0, 5.0, 3.0],
            vec![1.0, 0.0, 2.0, 1.0, 4.0],
        )
        .unwrap();
        assert!(matches!(jackknife_estimates(&d), Err(Error::SingularDesign(_))));
    }

    #[test]
    fn acceleration_examples() {
        assert_eq!(acceleration(&[3.0, 3.0, 3.0, 3.0]), 0.0);
        assert_eq!(acceleration(&[1.0, 2.0, 3.0, 4.0, 5.0]), 0.0);
        // Hand evaluation: d = (2, 1, −3), Σd³ = −18, Σd² = 14.
        let a = acceleration(&[1.0, 2.0, 6.0]);
        assert!((a - (-18.0 / (6.0 * 14f64.powf(1.5)))).abs() < 1e-15);
        assert!((a + 0.057_270_266_124_090_94).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn acceleration_scale_invariant(v in prop::collection::vec(-10.0f64..10.0, 3..60), s in 0.01f64..100.0) {
            let scaled: Vec<f64> = v.iter().map(|x| x * s).collect();
            prop_assert!((acceleration(&v) - acceleration(&scaled)).abs() < 1e-12);
        }
    }
}
