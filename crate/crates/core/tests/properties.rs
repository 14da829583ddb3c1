use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cosbias_core::direct_bias::first_direction_power_iteration;
use cosbias_core::oracles::random_orthogonal;
use cosbias_core::same::same_word_multi;
use cosbias_core::weat::weat_p_value;
use cosbias_core::{
    bias_direction_pca, direct_bias, mac_score, same_set_binary, same_skew, weat_effect_size,
    weat_test_statistic, Error, Vector,
};

fn vectors(dim: usize, len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Vector>> {
    prop::collection::vec(
        prop::collection::vec(-1.0f64..1.0, dim)
            .prop_filter("nonzero", |c| c.iter().map(|x| x * x).sum::<f64>() > 1e-4)
            .prop_map(|c| Vector::from_slice(&c)),
        len,
    )
}

fn rotate(set: &[Vector], q: &[Vec<f64>], s: f64) -> Vec<Vector> {
    set.iter().map(|v| v.transform(q).scale(s)).collect()
}

#[derive(Debug, Clone)]
struct Case {
    x: Vec<Vector>,
    y: Vec<Vector>,
    a: Vec<Vector>,
    b: Vec<Vector>,
}

fn case(dim: usize) -> impl Strategy<Value = Case> {
    (2usize..6)
        .prop_flat_map(move |m| (vectors(dim, m..=m), vectors(dim, m..=m), vectors(dim, 1..=4), vectors(dim, 1..=4)))
        .prop_map(|(x, y, a, b)| Case { x, y, a, b })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn effect_size_stays_within_two(c in case(5)) {
        match weat_effect_size(&c.x, &c.y, &c.a, &c.b) {
            Ok(d) => prop_assert!(d.abs() <= 2.0 + 1e-9),
            Err(Error::UndefinedEffectSize) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn swapping_targets_or_attributes_flips_sign(c in case(4)) {
        if let Ok(d) = weat_effect_size(&c.x, &c.y, &c.a, &c.b) {
            let swapped_targets = weat_effect_size(&c.y, &c.x, &c.a, &c.b).unwrap();
            let swapped_attrs = weat_effect_size(&c.x, &c.y, &c.b, &c.a).unwrap();
            prop_assert!((d + swapped_targets).abs() <= 1e-12);
            prop_assert!((d + swapped_attrs).abs() <= 1e-12);
        }
        let s = weat_test_statistic(&c.x, &c.y, &c.a, &c.b).unwrap();
        let t = weat_test_statistic(&c.y, &c.x, &c.a, &c.b).unwrap();
        prop_assert!((s + t).abs() <= 1e-12);
    }

    #[test]
    fn metrics_survive_rotation_and_scaling(c in case(4), seed in any::<u64>(), s in 0.1f64..10.0) {
        let q = random_orthogonal(&mut ChaCha8Rng::seed_from_u64(seed), 4);
        let r = |v: &[Vector]| rotate(v, &q, s);
        let (x, y, a, b) = (r(&c.x), r(&c.y), r(&c.a), r(&c.b));
        if let (Ok(d0), Ok(d1)) = (weat_effect_size(&c.x, &c.y, &c.a, &c.b), weat_effect_size(&x, &y, &a, &b)) {
            prop_assert!((d0 - d1).abs() <= 1e-8);
        }
        let m0 = mac_score(&c.x, &[&c.a, &c.b]).unwrap().score;
        let m1 = mac_score(&x, &[&a, &b]).unwrap().score;
        prop_assert!((m0 - m1).abs() <= 1e-9);
        if let (Ok(s0), Ok(s1)) = (same_set_binary(&c.x, &c.a, &c.b), same_set_binary(&x, &a, &b)) {
            prop_assert!((s0.set_score - s1.set_score).abs() <= 1e-9);
            let k0 = same_skew(&c.x, &c.a, &c.b).unwrap();
            let k1 = same_skew(&x, &a, &b).unwrap();
            prop_assert!((k0 - k1).abs() <= 1e-9);
        }
    }

    #[test]
    fn two_set_multi_matches_binary(w in vectors(3, 1..=1), a in vectors(3, 1..=3), b in vectors(3, 1..=3)) {
        if let Ok(binary) = same_set_binary(&w, &a, &b) {
            let multi = same_word_multi(&w[0], &[&a, &b]).unwrap();
            prop_assert!((multi - binary.set_score).abs() <= 1e-9);
        }
    }

    #[test]
    fn pca_direction_agrees_with_power_iteration(pairs in vectors(4, 4..=4), more in vectors(4, 4..=4)) {
        let defining: Vec<Vec<Vector>> = pairs.into_iter().zip(more).map(|(u, v)| vec![u, v]).collect();
        let sub = bias_direction_pca(&defining, 2).unwrap();
        let gap = sub.explained_variance[0] - sub.explained_variance[1];
        prop_assume!(gap > 1e-3 * sub.explained_variance[0].max(1e-12));
        let power = first_direction_power_iteration(&defining).unwrap();
        let dot = sub.direction().dot(&power).abs();
        prop_assert!((dot - 1.0).abs() <= 1e-6, "dot {dot}");
    }

    #[test]
    fn direct_bias_is_bounded(words in vectors(3, 1..=6), g in vectors(3, 1..=1), c in 0.5f64..3.0) {
        let g = g[0].normalized().unwrap();
        let db = direct_bias(&words, &g, c).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&db));
    }
}

#[test]
fn exhaustive_p_value_counts_partitions() {
    let e = |x: f64, y: f64| Vector::from_slice(&[x, y]);
    let a = [e(1.0, 0.0)];
    let b = [e(0.0, 1.0)];
    let x = [e(1.0, 0.1), e(1.0, 0.2)];
    let y = [e(0.1, 1.0), e(0.2, 1.0)];
    let t = weat_p_value(&x, &y, &a, &b, 1000, 0).unwrap();
    assert!(t.exhaustive);
    assert_eq!(t.permutations_used, 6);
    // the identity ties itself and ties do not count
    assert_abs_diff_eq!(t.p_value, 0.0);
    let flipped = weat_p_value(&y, &x, &a, &b, 1000, 0).unwrap();
    assert_abs_diff_eq!(flipped.p_value, 5.0 / 6.0, epsilon = 1e-12);
}

#[test]
fn sampled_p_value_is_reproducible() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let set = |rng: &mut ChaCha8Rng, n| -> Vec<Vector> {
        (0..n).map(|_| cosbias_core::oracles::random_vector(rng, 6)).collect()
    };
    let (x, y, a, b) = (set(&mut rng, 12), set(&mut rng, 12), set(&mut rng, 3), set(&mut rng, 3));
    let p1 = weat_p_value(&x, &y, &a, &b, 500, 9).unwrap();
    let p2 = weat_p_value(&x, &y, &a, &b, 500, 9).unwrap();
    assert!(!p1.exhaustive);
    assert_eq!(p1, p2);
}
