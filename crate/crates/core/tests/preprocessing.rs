use rand::Rng;
use symseries::imputeprep::{point_mask, pre_interpolate, MaskedSeries};
use symseries::rng::stream;

fn series(seed: u64, len: usize) -> Vec<f64> {
    let mut rng = stream(seed);
    (0..len).map(|_| rng.random_range(-3.0..3.0)).collect()
}

#[test]
fn mask_counts_follow_ratio() {
    let x = series(0, 96);
    for (ratio, want) in [(0.125, 12), (0.25, 24), (0.375, 36), (0.5, 48), (0.001, 0)] {
        let ms = point_mask(&x, ratio, &mut stream(9)).unwrap();
        assert_eq!(ms.missing_count(), want);
        assert_eq!(ms.original, x);
        for (v, m) in ms.values.iter().zip(&ms.miss_mask) {
            assert_eq!(v.is_none(), *m);
        }
    }
    let a = point_mask(&x, 0.25, &mut stream(3)).unwrap();
    let b = point_mask(&x, 0.25, &mut stream(3)).unwrap();
    assert_eq!(a, b);
    for bad in [0.0, 1.0, -0.1, f64::NAN] {
        assert!(point_mask(&x, bad, &mut stream(0)).is_err());
    }
}

#[test]
fn complete_series_unchanged() {
    let x = series(1, 96);
    let ms = MaskedSeries::from_observed(x.iter().copied().map(Some).collect());
    assert_eq!(pre_interpolate(&ms).unwrap(), x);
}

#[test]
fn neighbour_rules() {
    let ms = MaskedSeries::from_observed(vec![None, Some(5.0), None, Some(7.0), Some(1.0), None]);
    assert_eq!(pre_interpolate(&ms).unwrap(), vec![5.0, 5.0, 6.0, 7.0, 1.0, 1.0]);
}

/// Every gap's fill lies within the range of the observed values bounding it,
/// and observed values are never touched.
#[test]
fn heavy_masking_fills_within_bounds() {
    for seed in 0..200 {
        let x = series(100 + seed, 96);
        let ms = point_mask(&x, 0.5, &mut stream(seed)).unwrap();
        let out = pre_interpolate(&ms).unwrap();
        assert!(out.iter().all(|v| v.is_finite()));
        let mut t = 0;
        while t < out.len() {
            if !ms.miss_mask[t] {
                assert_eq!(out[t], x[t]);
                t += 1;
                continue;
            }
            let start = t;
            while t < out.len() && ms.miss_mask[t] {
                t += 1;
            }
            let bounds: Vec<f64> = [start.checked_sub(1), (t < out.len()).then_some(t)]
                .into_iter()
                .flatten()
                .map(|i| x[i])
                .collect();
            let (lo, hi) = bounds.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            assert!(out[start..t].iter().all(|&v| v >= lo && v <= hi), "seed {seed} gap {start}..{t}");
        }
    }
}

#[test]
fn three_point_gap_between_zero_and_four() {
    let ms = MaskedSeries::from_observed(vec![Some(0.0), None, None, None, Some(4.0)]);
    let out = pre_interpolate(&ms).unwrap();
    assert!(out.iter().all(|&v| (0.0..=4.0).contains(&v)));
    assert_eq!((out[0], out[4]), (0.0, 4.0));
}
