//! The lattice walks pipes perform in an unbounded strip of boxes.
//!
//! A single pipe passes one box per time step; a cross tile (probability p)
//! keeps its facing, a bump tile flips it, so the diagonal index d(t) performs
//! a persistent random walk whose stretches between turns are geometric. Two
//! pipes together are described by the four-state facing chain on
//! (NN, NE, EN, EE): while the pipes sit in distinct boxes the coordinates
//! flip independently, and the gap h(t) between their diagonals moves by
//! nu(state) per step. When the pipes share a box they draw one common tile:
//! a cross lets them pass through each other, a bump bounces both.
//!
//! The chain's stationary law is uniform and the ν-sums satisfy a central
//! limit theorem with variance sigma^2 = 2p/(1-p) per step; [`sigma2_fundamental`]
//! computes that variance from the fundamental matrix of the chain and
//! [`sigma2_closed`] evaluates the closed form, so the two can be checked
//! against each other. [`phi_p`] is the matching normal CDF and
//! [`first_kiss_cdf_approx`] the limiting law of the first shared box.

use rand::Rng;

use crate::error::{Error, Result};
use crate::word::bernoulli;

/// Direction a pipe is heading: north (diagonal index falls by 1 per step) or
/// east (rises by 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Facing {
    North,
    East,
}

impl Facing {
    pub fn flip(self) -> Facing {
        match self {
            Facing::North => Facing::East,
            Facing::East => Facing::North,
        }
    }

    fn dir(self) -> i64 {
        match self {
            Facing::North => -1,
            Facing::East => 1,
        }
    }
}

/// Joint facing of a pipe pair; the first letter is the left pipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairState {
    NN,
    NE,
    EN,
    EE,
}

impl PairState {
    pub const ALL: [PairState; 4] = [PairState::NN, PairState::NE, PairState::EN, PairState::EE];

    pub fn index(self) -> usize {
        match self {
            PairState::NN => 0,
            PairState::NE => 1,
            PairState::EN => 2,
            PairState::EE => 3,
        }
    }

    pub fn facings(self) -> (Facing, Facing) {
        match self {
            PairState::NN => (Facing::North, Facing::North),
            PairState::NE => (Facing::North, Facing::East),
            PairState::EN => (Facing::East, Facing::North),
            PairState::EE => (Facing::East, Facing::East),
        }
    }

    pub fn from_facings(left: Facing, right: Facing) -> PairState {
        match (left, right) {
            (Facing::North, Facing::North) => PairState::NN,
            (Facing::North, Facing::East) => PairState::NE,
            (Facing::East, Facing::North) => PairState::EN,
            (Facing::East, Facing::East) => PairState::EE,
        }
    }

    /// Gap increment nu: how much h = d_right - d_left moves while the pair
    /// holds this facing.
    pub fn nu(self) -> i64 {
        let (left, right) = self.facings();
        right.dir() - left.dir()
    }

    pub fn sample_uniform(rng: &mut impl Rng) -> PairState {
        PairState::ALL[rng.random_range(0..4)]
    }
}

/// Initial law of the pair chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairInit {
    /// Uniform over the four states; this is the stationary law.
    Uniform,
    Fixed(PairState),
}

impl PairInit {
    fn draw(self, rng: &mut impl Rng) -> PairState {
        match self {
            PairInit::Uniform => PairState::sample_uniform(rng),
            PairInit::Fixed(s) => s,
        }
    }
}

/// The facing-pair chain: transition matrix and gap increments, in state
/// order NN, NE, EN, EE.
#[derive(Debug, Clone)]
pub struct ChainSpec {
    pub p: f64,
    /// Row-stochastic, symmetric: both facings flip independently with
    /// probability 1-p.
    pub matrix: [[f64; 4]; 4],
    pub nu: [f64; 4],
}

pub const STATE_NAMES: [&str; 4] = ["NN", "NE", "EN", "EE"];

fn check_open_unit(p: f64, what: &str) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "{what} must lie strictly inside (0, 1), got {p}"
        )));
    }
    Ok(())
}

/// Builds the pair chain for cross probability p.
pub fn transition_matrix(p: f64) -> Result<ChainSpec> {
    check_open_unit(p, "cross probability")?;
    let q = 1.0 - p;
    // Entry (s, s'): each coordinate keeps with probability p, flips with 1-p,
    // independently.
    let mut matrix = [[0.0; 4]; 4];
    for s in PairState::ALL {
        let (a, b) = s.facings();
        for t in PairState::ALL {
            let (c, d) = t.facings();
            let first = if a == c { p } else { q };
            let second = if b == d { p } else { q };
            matrix[s.index()][t.index()] = first * second;
        }
    }
    let mut nu = [0.0; 4];
    for s in PairState::ALL {
        nu[s.index()] = s.nu() as f64;
    }
    Ok(ChainSpec { p, matrix, nu })
}

/// The stationary law of the pair chain: uniform, because the matrix is
/// doubly stochastic. Verified against the matrix to 1e-12.
pub fn stationary(chain: &ChainSpec) -> [f64; 4] {
    let pi = [0.25; 4];
    for j in 0..4 {
        let entry: f64 = (0..4).map(|i| pi[i] * chain.matrix[i][j]).sum();
        assert!(
            (entry - pi[j]).abs() < 1e-12,
            "uniform law is not stationary for this matrix"
        );
    }
    pi
}

/// Solves a 4x4 linear system by Gaussian elimination with partial pivoting.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Result<[f64; 4]> {
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-12 {
            return Err(Error::Singular("inverting the facing chain's fundamental matrix"));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..4 {
            let factor = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let partial: f64 = (row + 1..4).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - partial) / a[row][row];
    }
    Ok(x)
}

/// Asymptotic variance per step of the nu-sums of the pair chain, computed
/// from the fundamental matrix Z = (I - P + Pi)^{-1} (Pi has every entry 1/4):
/// sigma^2 = sum_i pi_i nu_i ((2Z - I) nu)_i. Must agree with
/// [`sigma2_closed`] to high precision.
pub fn sigma2_fundamental(p: f64) -> Result<f64> {
    let chain = transition_matrix(p)?;
    let pi = stationary(&chain);
    let mut a = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let identity = if i == j { 1.0 } else { 0.0 };
            a[i][j] = identity - chain.matrix[i][j] + pi[j];
        }
    }
    let znu = solve4(a, chain.nu)?;
    let sigma2 = (0..4)
        .map(|i| pi[i] * chain.nu[i] * (2.0 * znu[i] - chain.nu[i]))
        .sum();
    Ok(sigma2)
}

/// The closed form 2p/(1-p) for the same variance: each facing contributes
/// p/(1-p) per step and the two are independent.
pub fn sigma2_closed(p: f64) -> f64 {
    2.0 * p / (1.0 - p)
}

/// Error function by a rational approximation (Abramowitz and Stegun 7.1.26);
/// absolute error at most 1.5e-7 on the whole line.
pub fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}

/// CDF of the centered normal with variance 2p/(1-p); the scaling limit of
/// the nu-sums. Absolute error at most 1e-7. Requires p strictly inside
/// (0, 1).
pub fn phi_p(x: f64, p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "phi_p needs p in (0, 1), got {p}");
    // Phi(x / sigma) with sigma^2 = 2p/(1-p); folding sqrt(2) into the scale
    // leaves erf(x / (2 sqrt(p/(1-p)))).
    0.5 * (1.0 + erf(x / (2.0 * (p / (1.0 - p)).sqrt())))
}

/// Limiting CDF of the first shared box of two pipes started ell apart,
/// watched for k steps: 2 - 2 Phi_p(ell k^{-1/2}), clamped to [0, 1].
pub fn first_kiss_cdf_approx(ell: f64, k: f64, p: f64) -> f64 {
    assert!(ell >= 0.0 && k >= 1.0, "need ell >= 0 and k >= 1");
    (2.0 - 2.0 * phi_p(ell / k.sqrt(), p)).clamp(0.0, 1.0)
}

/// Trajectory of a single pipe: diagonal index, facing, and turn times.
#[derive(Debug, Clone)]
pub struct PipePath {
    /// d(0), .., d(max_steps); steps move the index by exactly 1.
    pub d: Vec<i64>,
    /// facing(t) moves the pipe from d(t) to d(t+1).
    pub facing: Vec<Facing>,
    /// Times t >= 1 with facing(t) != facing(t-1).
    pub turns: Vec<u64>,
}

impl PipePath {
    /// The k-th turn time (1-indexed), if the pipe turned that often.
    pub fn tau(&self, k: usize) -> Option<u64> {
        if k == 0 {
            return Some(0);
        }
        self.turns.get(k - 1).copied()
    }

    /// First time |d(t) - d(0)| >= z, if reached.
    pub fn first_passage(&self, z: u64) -> Option<u64> {
        self.d
            .iter()
            .position(|&dt| (dt - self.d[0]).unsigned_abs() >= z)
            .map(|t| t as u64)
    }
}

/// Runs a single pipe for max_steps steps: each step the facing survives with
/// probability p, then the pipe moves one box.
pub fn simulate_single_pipe(
    p: f64,
    init: Facing,
    max_steps: u64,
    rng: &mut impl Rng,
) -> PipePath {
    let steps = max_steps as usize;
    let mut d = Vec::with_capacity(steps + 1);
    let mut facing = Vec::with_capacity(steps + 1);
    let mut turns = Vec::new();
    d.push(0);
    facing.push(init);
    for t in 1..=steps {
        let prev = facing[t - 1];
        d.push(d[t - 1] + prev.dir());
        let next = if bernoulli(p, rng) { prev } else { prev.flip() };
        if next != prev {
            turns.push(t as u64);
        }
        facing.push(next);
    }
    PipePath { d, facing, turns }
}

/// Outcome of a two-pipe run.
#[derive(Debug, Clone)]
pub struct PairOutcome {
    /// First time the pipes share a box, if within the step budget.
    pub first_kiss: Option<u64>,
    /// Shared boxes resolved by a cross tile over the whole run.
    pub crossings: u64,
    /// Gap trajectory h(0), .., h(max_steps); always even when h(0) is.
    pub h: Vec<i64>,
}

/// Runs two pipes started on a common anti-diagonal with gap h(0) = ell (the
/// right pipe's diagonal minus the left's). While the boxes differ the two
/// facings flip independently; a shared box draws one tile, a cross letting
/// the pipes pass through each other and a bump bouncing both.
pub fn simulate_pair(
    ell: u64,
    init: (Facing, Facing),
    p: f64,
    max_steps: u64,
    rng: &mut impl Rng,
) -> Result<PairOutcome> {
    if ell % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "pipes on a common anti-diagonal sit an even gap apart, got {ell}"
        )));
    }
    check_open_unit(p, "cross probability")?;
    let (mut left, mut right) = init;
    let mut h = Vec::with_capacity(max_steps as usize + 1);
    let mut gap = ell as i64;
    h.push(gap);
    let mut first_kiss = if gap == 0 { Some(0) } else { None };
    let mut crossings = 0;
    for t in 1..=max_steps {
        gap += right.dir() - left.dir();
        h.push(gap);
        if gap == 0 {
            first_kiss.get_or_insert(t);
            // One shared tile for the shared box.
            if bernoulli(p, rng) {
                crossings += 1;
            } else {
                left = left.flip();
                right = right.flip();
            }
        } else {
            if !bernoulli(p, rng) {
                left = left.flip();
            }
            if !bernoulli(p, rng) {
                right = right.flip();
            }
        }
    }
    Ok(PairOutcome { first_kiss, crossings, h })
}

/// Like [`simulate_pair`] but records nothing beyond the first shared box;
/// `None` when the pipes stay apart for all max_steps steps.
pub fn sample_first_kiss(
    ell: u64,
    init: (Facing, Facing),
    p: f64,
    max_steps: u64,
    rng: &mut impl Rng,
) -> Result<Option<u64>> {
    if ell % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "pipes on a common anti-diagonal sit an even gap apart, got {ell}"
        )));
    }
    check_open_unit(p, "cross probability")?;
    if ell == 0 {
        return Ok(Some(0));
    }
    let (mut left, mut right) = init;
    let mut gap = ell as i64;
    for t in 1..=max_steps {
        gap += right.dir() - left.dir();
        if gap == 0 {
            return Ok(Some(t));
        }
        if !bernoulli(p, rng) {
            left = left.flip();
        }
        if !bernoulli(p, rng) {
            right = right.flip();
        }
    }
    Ok(None)
}

/// The nu-sum over the first k states of the pair chain started from init.
pub fn sample_psi(k: u64, p: f64, init: PairInit, rng: &mut impl Rng) -> Result<i64> {
    check_open_unit(p, "cross probability")?;
    let mut state = init.draw(rng);
    let mut psi = 0;
    for _ in 0..k {
        psi += state.nu();
        state = step_pair_state(state, p, rng);
    }
    Ok(psi)
}

/// First k with nu-sum >= z, capped; `None` when the cap is hit first.
pub fn hitting_time_psi(
    z: i64,
    p: f64,
    init: PairInit,
    cap: u64,
    rng: &mut impl Rng,
) -> Result<Option<u64>> {
    check_open_unit(p, "cross probability")?;
    let mut state = init.draw(rng);
    let mut psi = 0;
    if psi >= z {
        return Ok(Some(0));
    }
    for k in 1..=cap {
        psi += state.nu();
        state = step_pair_state(state, p, rng);
        if psi >= z {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

fn step_pair_state(state: PairState, p: f64, rng: &mut impl Rng) -> PairState {
    let (mut left, mut right) = state.facings();
    if !bernoulli(p, rng) {
        left = left.flip();
    }
    if !bernoulli(p, rng) {
        right = right.flip();
    }
    PairState::from_facings(left, right)
}

/// A geometric variate on {1, 2, ...} with success probability `success`:
/// the gap between consecutive turns of a pipe has this law with success 1-p.
pub fn sample_geometric(success: f64, rng: &mut impl Rng) -> u64 {
    assert!(success > 0.0 && success <= 1.0);
    if success >= 1.0 {
        return 1;
    }
    // Inverse CDF on u in (0, 1]; 1 - random() avoids ln(0).
    let u = 1.0 - rng.random::<f64>();
    1 + (u.ln() / (1.0 - success).ln()).floor() as u64
}

/// Closed-form tail bound for a sum of k geometric variates with success 1-p
/// deviating from its mean k/(1-p) by at least xi:
/// 2 exp(-((1-p)/2) xi^2 / (k/(1-p) + xi)).
pub fn chernoff_bound(k: u64, xi: f64, p: f64) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidArgument("need k >= 1".into()));
    }
    if !(xi > 0.0) {
        return Err(Error::InvalidArgument(format!("need xi > 0, got {xi}")));
    }
    check_open_unit(p, "cross probability")?;
    let q = 1.0 - p;
    Ok(2.0 * (-(q / 2.0) * xi * xi / (k as f64 / q + xi)).exp())
}

/// Closed-form bound C1 exp(-C2 z^2 / (z + r)) for the probability that a
/// pipe veers z diagonals off its start within r steps. The constants are not
/// pinned down; callers choose them.
pub fn veer_bound(z: f64, r: f64, c1: f64, c2: f64) -> Result<f64> {
    if !(z >= 2.0) || !(r >= 0.0) || !(c1 > 0.0) || !(c2 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need z >= 2, r >= 0, C1 > 0, C2 > 0; got z={z}, r={r}, C1={c1}, C2={c2}"
        )));
    }
    Ok(c1 * (-c2 * z * z / (z + r)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matrix_is_symmetric_doubly_stochastic() {
        for p in [0.1, 0.3, 0.5, 0.77] {
            let chain = transition_matrix(p).unwrap();
            for i in 0..4 {
                let row: f64 = chain.matrix[i].iter().sum();
                assert_abs_diff_eq!(row, 1.0, epsilon = 1e-12);
                for j in 0..4 {
                    assert_abs_diff_eq!(
                        chain.matrix[i][j],
                        chain.matrix[j][i],
                        epsilon = 1e-15
                    );
                }
            }
            assert_eq!(stationary(&chain), [0.25; 4]);
        }
        assert!(transition_matrix(0.0).is_err());
        assert!(transition_matrix(1.0).is_err());
    }

    #[test]
    fn matrix_known_entries() {
        let chain = transition_matrix(0.5).unwrap();
        for row in chain.matrix {
            for entry in row {
                assert_abs_diff_eq!(entry, 0.25, epsilon = 1e-15);
            }
        }
        let chain = transition_matrix(0.3).unwrap();
        let expected = [0.09, 0.21, 0.21, 0.49];
        for (got, want) in chain.matrix[0].iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert_eq!(chain.nu, [0.0, 2.0, -2.0, 0.0]);
    }

    #[test]
    fn variance_routes_agree() {
        for i in 1..=19 {
            let p = i as f64 * 0.05;
            let fundamental = sigma2_fundamental(p).unwrap();
            assert!(
                (fundamental - sigma2_closed(p)).abs() <= 1e-9,
                "p={p}: {fundamental} vs {}",
                sigma2_closed(p)
            );
        }
        assert_abs_diff_eq!(sigma2_fundamental(0.5).unwrap(), 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sigma2_fundamental(1.0 / 3.0).unwrap(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sigma2_fundamental(0.9).unwrap(), 18.0, epsilon = 1e-9);
    }

    #[test]
    fn erf_and_phi_accuracy() {
        // Reference values of the standard normal CDF.
        let standard = |x: f64| 0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2));
        assert!((standard(1.0) - 0.841344746068543).abs() < 1e-7);
        assert!((standard(2.0) - 0.977249868051821).abs() < 1e-7);
        assert!((standard(-1.0) - 0.158655253931457).abs() < 1e-7);

        for p in [0.2, 0.5, 0.8] {
            assert_abs_diff_eq!(phi_p(0.0, p), 0.5, epsilon = 1e-7);
            for x in [0.1, 0.5, 1.0, 2.5, 7.0] {
                assert!((phi_p(-x, p) + phi_p(x, p) - 1.0).abs() < 1e-7);
                // Weak in the far tail, where the approximation saturates.
                assert!(phi_p(x, p) >= phi_p(x - 0.05, p));
            }
            assert!(phi_p(1.0, p) > phi_p(0.5, p));
        }
        // Variance 2p/(1-p) = 2 at p = 0.5, so x = sqrt(2) is one deviation.
        assert!((phi_p(std::f64::consts::SQRT_2, 0.5) - 0.841345).abs() < 1e-6);
    }

    #[test]
    fn first_kiss_cdf_shape() {
        assert_abs_diff_eq!(first_kiss_cdf_approx(0.0, 100.0, 0.5), 1.0, epsilon = 1e-7);
        assert!(first_kiss_cdf_approx(1000.0, 4.0, 0.5) < 1e-9);
        // 2 - 2 Phi_std(1/sqrt(2)) at unit-deviation scaling.
        assert!((first_kiss_cdf_approx(2.0, 4.0, 0.5) - 0.4795).abs() < 1e-4);
        let mut prev = 1.0;
        for ell in [0.0, 2.0, 4.0, 8.0, 16.0] {
            let value = first_kiss_cdf_approx(ell, 64.0, 0.5);
            assert!(value <= prev);
            prev = value;
        }
    }

    #[test]
    fn single_pipe_mechanics() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let path = simulate_single_pipe(0.5, Facing::East, 2000, &mut rng);
        assert_eq!(path.d.len(), 2001);
        assert_eq!(path.first_passage(0), Some(0));
        for t in 1..path.d.len() {
            assert_eq!((path.d[t] - path.d[t - 1]).abs(), 1);
        }
        // Turns are exactly the facing changes, and the drift sign alternates.
        for (k, &t) in path.turns.iter().enumerate() {
            let t = t as usize;
            assert_ne!(path.facing[t], path.facing[t - 1]);
            if k > 0 {
                assert!(t > path.turns[k - 1] as usize);
            }
        }
        // d moves in the facing's direction.
        for t in 0..2000 {
            let step = path.d[t + 1] - path.d[t];
            assert_eq!(step, if path.facing[t] == Facing::East { 1 } else { -1 });
        }
    }

    #[test]
    fn turn_gaps_look_geometric() {
        let p: f64 = 0.7;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let path = simulate_single_pipe(p, Facing::East, 200_000, &mut rng);
        let mut gaps = Vec::new();
        let mut prev = 0u64;
        for &t in &path.turns {
            gaps.push(t - prev);
            prev = t;
        }
        assert!(gaps.iter().all(|&g| g >= 1));
        let mean = gaps.iter().sum::<u64>() as f64 / gaps.len() as f64;
        let expected = 1.0 / (1.0 - p);
        // Geometric(1-p) mean with a generous sampling margin.
        assert!((mean - expected).abs() < 0.05, "mean {mean} vs {expected}");
    }

    #[test]
    fn geometric_sampler_matches_turn_gap_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let trials = 200_000;
        let q = 0.25;
        let mut sum = 0u64;
        let mut ones = 0u64;
        for _ in 0..trials {
            let g = sample_geometric(q, &mut rng);
            assert!(g >= 1);
            sum += g;
            ones += (g == 1) as u64;
        }
        let mean = sum as f64 / trials as f64;
        assert!((mean - 4.0).abs() < 0.05, "mean {mean}");
        let p1 = ones as f64 / trials as f64;
        assert!((p1 - q).abs() < 0.01, "P(G=1) {p1}");
    }

    #[test]
    fn pair_gap_stays_even_and_kisses_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = simulate_pair(4, (Facing::East, Facing::North), 0.5, 500, &mut rng).unwrap();
        assert!(out.h.iter().all(|&h| h % 2 == 0));
        match out.first_kiss {
            Some(t) => {
                assert_eq!(out.h[t as usize], 0);
                assert!(out.h[..t as usize].iter().all(|&h| h != 0));
            }
            None => assert!(out.h.iter().all(|&h| h != 0)),
        }
        let at_zero = simulate_pair(0, (Facing::East, Facing::North), 0.5, 10, &mut rng).unwrap();
        assert_eq!(at_zero.first_kiss, Some(0));
        assert!(simulate_pair(3, (Facing::East, Facing::North), 0.5, 10, &mut rng).is_err());
    }

    #[test]
    fn lean_first_kiss_matches_full_run() {
        // Same seed stream, same draws while apart: identical kiss times.
        for seed in 0..20 {
            let mut a = ChaCha8Rng::seed_from_u64(seed);
            let mut b = ChaCha8Rng::seed_from_u64(seed);
            let full = simulate_pair(6, (Facing::East, Facing::North), 0.4, 300, &mut a).unwrap();
            let lean = sample_first_kiss(6, (Facing::East, Facing::North), 0.4, 300, &mut b).unwrap();
            assert_eq!(full.first_kiss, lean);
        }
    }

    #[test]
    fn psi_mechanics() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(sample_psi(0, 0.5, PairInit::Uniform, &mut rng).unwrap(), 0);
        for _ in 0..200 {
            let psi = sample_psi(17, 0.3, PairInit::Uniform, &mut rng).unwrap();
            assert_eq!(psi % 2, 0);
            assert!(psi.abs() <= 34);
        }
        assert_eq!(
            hitting_time_psi(0, 0.5, PairInit::Uniform, 10, &mut rng).unwrap(),
            Some(0)
        );
        // From NE the first increment is +2, hitting 2 immediately.
        let hit = hitting_time_psi(2, 0.5, PairInit::Fixed(PairState::NE), 10, &mut rng).unwrap();
        assert_eq!(hit, Some(1));
    }

    #[test]
    fn closed_form_bounds() {
        let b = chernoff_bound(100, 50.0, 0.5).unwrap();
        assert_abs_diff_eq!(b, 2.0 * (-2.5f64).exp(), epsilon = 1e-12);
        // Vacuous for tiny deviations.
        assert!(chernoff_bound(100, 1e-9, 0.5).unwrap() > 1.999);
        assert!(chernoff_bound(0, 1.0, 0.5).is_err());
        assert!(chernoff_bound(10, -1.0, 0.5).is_err());

        let v = veer_bound(10.0, 0.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(v, (-10.0f64).exp(), epsilon = 1e-15);
        assert!(veer_bound(1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn nu_matches_gap_increments() {
        assert_eq!(PairState::NN.nu(), 0);
        assert_eq!(PairState::NE.nu(), 2);
        assert_eq!(PairState::EN.nu(), -2);
        assert_eq!(PairState::EE.nu(), 0);
        for s in PairState::ALL {
            let (l, r) = s.facings();
            assert_eq!(PairState::from_facings(l, r), s);
        }
    }
}
