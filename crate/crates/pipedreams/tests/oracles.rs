//! Cross-checks between the two exact expectation routes and the Monte Carlo
//! estimator. The distribution DP and the subword enumeration share no code
//! beyond the word itself, so their agreement pins both.

use pipedreams::estimate::{
    exact_expected_inversions_dp, exact_expected_inversions_enum, mc_expected_inversions,
    mc_expected_inversions_with_mode, SamplingMode,
};
use pipedreams::shape::Shape;
use pipedreams::word::Word;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn hand_computed_expectations() {
    // [1,2] at p = 1/2: subwords (), (1), (2), (1,2) have 0, 1, 1, 2
    // inversions, each with probability 1/4.
    let w = Word::new(3, vec![1, 2]).unwrap();
    assert!((exact_expected_inversions_dp(&w, 0.5).unwrap() - 1.0).abs() < 1e-12);
    assert!((exact_expected_inversions_enum(&w, 0.5).unwrap() - 1.0).abs() < 1e-12);

    // [2,1,2] at p = 1/2: inversions 0,1,1,1,2,2,2,3 over the eight subwords.
    let w = Word::new(3, vec![2, 1, 2]).unwrap();
    assert!((exact_expected_inversions_dp(&w, 0.5).unwrap() - 1.25).abs() < 1e-12);
    assert!((exact_expected_inversions_enum(&w, 0.5).unwrap() - 1.25).abs() < 1e-12);

    // Degenerate retention keeps everything or nothing.
    assert!((exact_expected_inversions_dp(&w, 1.0).unwrap() - 3.0).abs() < 1e-12);
    assert!((exact_expected_inversions_enum(&w, 1.0).unwrap() - 3.0).abs() < 1e-12);
    assert_eq!(exact_expected_inversions_dp(&w, 0.0).unwrap(), 0.0);
    assert_eq!(exact_expected_inversions_enum(&w, 0.0).unwrap(), 0.0);
}

#[test]
fn dp_and_enumeration_agree_on_random_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0e5a11);
    for case in 0..200 {
        let n = rng.random_range(2..=5usize);
        let k = rng.random_range(0..=12usize);
        let letters: Vec<usize> = (0..k).map(|_| rng.random_range(1..n)).collect();
        let w = Word::new(n, letters).unwrap();
        let p: f64 = rng.random();
        let dp = exact_expected_inversions_dp(&w, p).unwrap();
        let en = exact_expected_inversions_enum(&w, p).unwrap();
        assert!(
            (dp - en).abs() <= 1e-12,
            "case {case}: n={n} word={:?} p={p}: dp={dp} enum={en}",
            w.letters
        );
    }
}

#[test]
fn monte_carlo_matches_dp_on_the_rank_five_staircase() {
    let shape = Shape::staircase(5).unwrap();
    let word = shape.canonical_linear_extension().word();
    for &p in &[0.3, 0.5, 0.7] {
        let exact = exact_expected_inversions_dp(&word, p).unwrap();
        let est = mc_expected_inversions(&shape, p, 100_000, 0xfeed).unwrap();
        assert!(
            (est.mean - exact).abs() <= 3.0 * est.stderr,
            "p={p}: mc={} +- {} vs exact={exact}",
            est.mean,
            est.stderr
        );

        let skip = mc_expected_inversions_with_mode(
            &shape,
            p,
            100_000,
            0xfeed,
            SamplingMode::GeometricSkip,
        )
        .unwrap();
        assert!(
            (skip.mean - exact).abs() <= 3.0 * skip.stderr,
            "p={p} geometric skip: mc={} +- {} vs exact={exact}",
            skip.mean,
            skip.stderr
        );
    }
}
