//! Shared generators for the integration tests: random order-convex shapes,
//! random tilings, and random words read off those shapes.
#![allow(dead_code)]

use pipedreams::shape::{BoxCoord, Shape};
use pipedreams::word::Word;
use rand::Rng;

/// Grows a random order-convex shape of rank at most max_n with at most
/// max_boxes boxes: start from one box, then repeatedly try to add a random
/// neighbor of a member, keeping only additions that stay order-convex.
pub fn random_convex_shape(max_n: usize, max_boxes: usize, rng: &mut impl Rng) -> Shape {
    assert!(max_n >= 2 && max_boxes >= 1);
    let n = rng.random_range(2..=max_n);
    let target = rng.random_range(1..=max_boxes);
    let d0 = rng.random_range(1..n) as i64;
    let l0 = d0 % 2 + 2 * rng.random_range(0..3i64);
    let mut boxes = vec![((l0 + d0) / 2, (l0 - d0) / 2)];
    let mut attempts = 0;
    while boxes.len() < target && attempts < 20 * target {
        attempts += 1;
        let (x, y) = boxes[rng.random_range(0..boxes.len())];
        let (dx, dy) = [(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, -1)]
            [rng.random_range(0..6)];
        let candidate = (x + dx, y + dy);
        let d = candidate.0 - candidate.1;
        if d < 1 || d >= n as i64 || boxes.contains(&candidate) {
            continue;
        }
        boxes.push(candidate);
        let shape = Shape::from_boxes(n, &boxes).expect("in-rank boxes");
        if !shape.is_order_convex() {
            boxes.pop();
        }
    }
    Shape::from_boxes(n, &boxes).expect("in-rank boxes")
}

/// One tile flag per box, cross with probability one half.
pub fn random_tiles(shape: &Shape, rng: &mut impl Rng) -> Vec<bool> {
    (0..shape.box_count()).map(|_| rng.random()).collect()
}

/// A uniform-ish random linear extension of the shape, read off as a word:
/// repeatedly emit the diagonal of a random minimal remaining box. For an
/// order-convex shape the result is always alternating.
pub fn random_extension_word(shape: &Shape, rng: &mut impl Rng) -> Word {
    let mut remaining: Vec<BoxCoord> = shape.boxes().collect();
    let mut letters = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let minimal: Vec<usize> = (0..remaining.len())
            .filter(|&i| {
                let b = remaining[i];
                !remaining
                    .iter()
                    .any(|&r| r != b && r.x <= b.x && r.y <= b.y)
            })
            .collect();
        let pick = minimal[rng.random_range(0..minimal.len())];
        let b = remaining.swap_remove(pick);
        letters.push(b.diagonal() as usize);
    }
    Word::new(shape.n(), letters).expect("diagonals are valid letters")
}

/// A random alternating word grown letter by letter. Appending i keeps every
/// pair restriction alternating exactly when i is not the most recent letter
/// of the pair {i-1, i} nor of the pair {i, i+1}, so each step samples from
/// the currently legal letters. Unlike extension words of convex shapes this
/// reaches words whose greedily grounded heap would not be convex.
pub fn random_alternating_word(n: usize, max_len: usize, rng: &mut impl Rng) -> Word {
    assert!(n >= 2);
    let len = rng.random_range(0..=max_len);
    // last_in_pair[i] is the most recent letter among {i, i+1}, 0 for none.
    let mut last_in_pair = vec![0usize; n];
    let mut letters = Vec::with_capacity(len);
    for _ in 0..len {
        let allowed: Vec<usize> = (1..n)
            .filter(|&i| {
                (i < 2 || last_in_pair[i - 1] != i) && (i + 1 >= n || last_in_pair[i] != i)
            })
            .collect();
        let letter = allowed[rng.random_range(0..allowed.len())];
        if letter >= 2 {
            last_in_pair[letter - 1] = letter;
        }
        if letter + 1 < n {
            last_in_pair[letter] = letter;
        }
        letters.push(letter);
    }
    Word::new(n, letters).expect("grown letters stay in range")
}

/// Small shapes with at most 10 boxes, for exhaustive tiling sweeps.
pub fn exhaustive_shapes() -> Vec<Shape> {
    vec![
        Shape::staircase(2).unwrap(),
        Shape::staircase(3).unwrap(),
        Shape::staircase(4).unwrap(),
        Shape::staircase(5).unwrap(),
        Shape::strip(4, 2).unwrap(),
        Shape::strip(6, 1).unwrap(),
        // Corner-sharing pair with an empty diagonal between.
        Shape::from_boxes(4, &[(1, 0), (2, -1)]).unwrap(),
        // An L of four diagonals.
        Shape::from_boxes(5, &[(1, 0), (1, -1), (2, 0), (2, -1), (2, -2)]).unwrap(),
    ]
}
