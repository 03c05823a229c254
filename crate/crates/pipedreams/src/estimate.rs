//! Estimators and experiments for the expected inversion count.
//!
//! The headline quantity is E(inv) for the permutation represented by a
//! random pipe dream on an order-convex shape. Three routes to it live here:
//!
//! * [`predicted_inversions`], the closed-form prediction
//!   sqrt(2/pi) sqrt(p/(1-p)) sum_i sqrt(O_i) from the diagonal counts alone;
//! * [`mc_expected_inversions`], a trial-parallel Monte Carlo estimator with
//!   counter-based RNG streams, bit-identical for a fixed (seed, trials)
//!   regardless of worker count;
//! * [`exact_expected_inversions`], exact at desk scale by two independent
//!   algorithms (a distribution DP over all n! permutations, and direct
//!   enumeration of all 2^K subwords) that must agree wherever both apply.
//!
//! The experiment drivers at the bottom produce [`Table`]s: the staircase
//! ratio against its 2 sqrt(2)/(3 sqrt(pi)) limit, the first-kiss CDF against
//! its normal approximation, and empirical checks of the closed-form tail
//! bounds.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::shape::Shape;
use crate::walk::{
    chernoff_bound, first_kiss_cdf_approx, hitting_time_psi, sample_first_kiss, sample_geometric,
    veer_bound, PairInit, PairState,
};
use crate::word::{bernoulli, Word};

/// Git description of the working tree this library was built from.
pub const BUILD_GIT_DESCRIBE: &str = env!("BUILD_GIT_DESCRIBE");

/// Compensated (Kahan) summation, used wherever many small terms accumulate.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> KahanSum {
        KahanSum::default()
    }

    pub fn add(&mut self, value: f64) {
        let y = value - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// A Monte Carlo estimate of E(inv) with its prediction alongside.
#[derive(Debug, Clone, Serialize)]
pub struct Estimate {
    pub mean: f64,
    /// Sample standard deviation divided by sqrt(trials).
    pub stderr: f64,
    /// Empirical variance of the per-trial inversion counts. Reported only;
    /// no asserted target exists for it.
    pub variance: f64,
    pub trials: u64,
    pub seed: u64,
    /// [`predicted_inversions`] of the shape; NaN when p is 0 or 1, where the
    /// prediction is not defined.
    pub predicted: f64,
    /// mean / predicted, present only when the prediction is finite and
    /// positive.
    pub ratio: Option<f64>,
}

/// How tiles are drawn inside a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    /// One uniform variate per box, in canonical order. The reference mode;
    /// byte-compatible with [`crate::pipedream::PipeDream::sample`].
    PerBox,
    /// Jump between tiles of the rarer kind with geometric gaps. Same tile
    /// distribution, different variates, so results differ from PerBox for
    /// the same seed; flagged in table metadata wherever used.
    GeometricSkip,
}

impl SamplingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplingMode::PerBox => "per_box",
            SamplingMode::GeometricSkip => "geometric_skip",
        }
    }
}

fn check_open_unit(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "cross probability must lie strictly inside (0, 1), got {p}"
        )));
    }
    Ok(())
}

fn check_closed_unit(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "cross probability must lie in [0, 1], got {p}"
        )));
    }
    Ok(())
}

/// The closed-form prediction sqrt(2/pi) sqrt(p/(1-p)) sum_i sqrt(O_i),
/// where O_i counts the boxes on diagonal i.
pub fn predicted_inversions(shape: &Shape, p: f64) -> Result<f64> {
    check_open_unit(p)?;
    let mut root_sum = KahanSum::new();
    for count in shape.diagonal_counts() {
        root_sum.add((count as f64).sqrt());
    }
    Ok((2.0 / PI).sqrt() * (p / (1.0 - p)).sqrt() * root_sum.value())
}

/// Limit of E(inv) / (sqrt(p/(1-p)) n^{3/2}) for the staircase family:
/// 2 sqrt(2) / (3 sqrt(pi)), about 0.531924.
pub fn staircase_limit_ratio() -> f64 {
    2.0 * SQRT_2 / (3.0 * PI.sqrt())
}

/// The same limit for the thick strip with rho = n/2: 1/sqrt(pi).
pub fn strip_limit_ratio() -> f64 {
    1.0 / PI.sqrt()
}

/// Inversions of the permutation of one sampled pipe dream. Identical draws
/// and swaps to sampling a `PipeDream` and taking its `inversion_count`,
/// without materializing the tiles.
fn trial_inversions(
    diags: &[u32],
    n: usize,
    p: f64,
    mode: SamplingMode,
    seed: u64,
    trial: u64,
    buf: &mut Vec<u32>,
) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    buf.clear();
    buf.extend(1..=n as u32);
    match mode {
        SamplingMode::PerBox => {
            for &d in diags {
                if bernoulli(p, &mut rng) {
                    buf.swap(d as usize - 1, d as usize);
                }
            }
        }
        SamplingMode::GeometricSkip => {
            if p == 0.0 {
                // no crosses
            } else if p == 1.0 {
                for &d in diags {
                    buf.swap(d as usize - 1, d as usize);
                }
            } else if p <= 0.5 {
                // Crosses are the rarer tile: jump straight to each one.
                let mut pos = sample_geometric(p, &mut rng) - 1;
                while (pos as usize) < diags.len() {
                    let d = diags[pos as usize] as usize;
                    buf.swap(d - 1, d);
                    pos += sample_geometric(p, &mut rng);
                }
            } else {
                // Bumps are rarer: everything between them is a cross.
                let mut prev = 0usize;
                let mut pos = sample_geometric(1.0 - p, &mut rng) - 1;
                while (pos as usize) < diags.len() {
                    for &d in &diags[prev..pos as usize] {
                        buf.swap(d as usize - 1, d as usize);
                    }
                    prev = pos as usize + 1;
                    pos += sample_geometric(1.0 - p, &mut rng);
                }
                for &d in &diags[prev..] {
                    buf.swap(d as usize - 1, d as usize);
                }
            }
        }
    }
    inversions_u32(buf)
}

/// Fenwick-tree inversion count over a one-line array with values 1..=n.
fn inversions_u32(one_line: &[u32]) -> u64 {
    let n = one_line.len();
    let mut tree = vec![0u64; n + 1];
    let mut total = 0;
    for (seen, &value) in one_line.iter().enumerate() {
        let mut i = value as usize;
        let mut below = 0;
        while i > 0 {
            below += tree[i];
            i -= i & i.wrapping_neg();
        }
        total += seen as u64 - below;
        let mut i = value as usize;
        while i <= n {
            tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }
    total
}

/// Monte Carlo estimate of E(inv) over independent pipe dream samples, in the
/// reference per-box sampling mode.
pub fn mc_expected_inversions(shape: &Shape, p: f64, trials: u64, seed: u64) -> Result<Estimate> {
    mc_expected_inversions_with_mode(shape, p, trials, seed, SamplingMode::PerBox)
}

/// As [`mc_expected_inversions`] with an explicit sampling mode.
///
/// Trials run in parallel; trial t draws from stream t of a counter-based
/// generator seeded once, and the per-trial results are reduced in trial
/// order with compensated summation, so the estimate depends only on
/// (seed, trials, mode), never on thread count or scheduling.
pub fn mc_expected_inversions_with_mode(
    shape: &Shape,
    p: f64,
    trials: u64,
    seed: u64,
    mode: SamplingMode,
) -> Result<Estimate> {
    check_closed_unit(p)?;
    if trials < 1 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    if let Some(missing) = shape.convexity_violation() {
        return Err(Error::NotOrderConvex {
            x: missing.x,
            y: missing.y,
        });
    }
    let n = shape.n();
    let diags: Vec<u32> = shape.boxes().map(|b| b.diagonal() as u32).collect();

    let inversion_counts: Vec<u64> = (0..trials)
        .into_par_iter()
        .map_init(Vec::new, |buf, t| {
            trial_inversions(&diags, n, p, mode, seed, t, buf)
        })
        .collect();

    let mut sum = KahanSum::new();
    for &inv in &inversion_counts {
        sum.add(inv as f64);
    }
    let mean = sum.value() / trials as f64;
    let variance = if trials > 1 {
        let mut squares = KahanSum::new();
        for &inv in &inversion_counts {
            let d = inv as f64 - mean;
            squares.add(d * d);
        }
        squares.value() / (trials - 1) as f64
    } else {
        0.0
    };
    let stderr = (variance / trials as f64).sqrt();
    let predicted = if p > 0.0 && p < 1.0 {
        predicted_inversions(shape, p)?
    } else {
        f64::NAN
    };
    let ratio = (predicted.is_finite() && predicted > 0.0).then(|| mean / predicted);
    Ok(Estimate {
        mean,
        stderr,
        variance,
        trials,
        seed,
        predicted,
        ratio,
    })
}

/// Exact E(inv) for the random subword of w, by whichever exact route fits:
/// the permutation-distribution DP for n <= 8, else subword enumeration for
/// length <= 20.
pub fn exact_expected_inversions(w: &Word, p: f64) -> Result<f64> {
    if w.n <= 8 {
        exact_expected_inversions_dp(w, p)
    } else if w.len() <= 20 {
        exact_expected_inversions_enum(w, p)
    } else {
        Err(Error::TooLarge {
            what: "exact expectation",
            detail: format!(
                "needs rank <= 8 (distribution DP) or length <= 20 (enumeration); \
                 got rank {} and length {}",
                w.n,
                w.len()
            ),
        })
    }
}

/// Exact route one: push the full probability distribution over all n!
/// permutations through the word. Letter i keeps each mass in place with
/// probability 1-p and moves it across the swap at positions i, i+1 with
/// probability p. Permutations are indexed by Lehmer rank, whose digit sum
/// is exactly the inversion count.
pub fn exact_expected_inversions_dp(w: &Word, p: f64) -> Result<f64> {
    check_closed_unit(p)?;
    let n = w.n;
    if n > 8 {
        return Err(Error::TooLarge {
            what: "distribution DP",
            detail: format!("rank {n} exceeds 8 (needs n! probability states)"),
        });
    }
    let nfact: usize = (1..=n).product();
    let mut swap_tables: Vec<Option<Vec<u32>>> = vec![None; n];
    for &letter in &w.letters {
        if swap_tables[letter].is_none() {
            swap_tables[letter] = Some(build_swap_table(n, nfact, letter));
        }
    }
    let mut mass = vec![0.0f64; nfact];
    mass[0] = 1.0; // identity has Lehmer rank 0
    let q = 1.0 - p;
    for &letter in &w.letters {
        let table = swap_tables[letter].as_ref().unwrap();
        // The swap is an involution with no fixed points; update each orbit
        // pair once.
        for u in 0..nfact {
            let v = table[u] as usize;
            if u < v {
                let a = mass[u];
                let b = mass[v];
                mass[u] = q * a + p * b;
                mass[v] = q * b + p * a;
            }
        }
    }
    let mut expectation = KahanSum::new();
    for (u, &m) in mass.iter().enumerate() {
        if m != 0.0 {
            expectation.add(m * lehmer_digit_sum(u, n) as f64);
        }
    }
    Ok(expectation.value())
}

/// rank -> rank of the permutation with one-line positions letter-1, letter
/// swapped.
fn build_swap_table(n: usize, nfact: usize, letter: usize) -> Vec<u32> {
    let mut table = vec![0u32; nfact];
    let mut buf = vec![0u32; n];
    for (u, entry) in table.iter_mut().enumerate() {
        lehmer_unrank(u, n, &mut buf);
        buf.swap(letter - 1, letter);
        *entry = lehmer_rank(&buf) as u32;
    }
    table
}

fn lehmer_unrank(mut rank: usize, n: usize, out: &mut [u32]) {
    let mut available: Vec<u32> = (1..=n as u32).collect();
    let mut fact: usize = (1..n).product::<usize>().max(1);
    for i in 0..n {
        let digit = rank / fact;
        rank %= fact;
        out[i] = available.remove(digit);
        if n - 1 - i > 0 {
            fact /= n - 1 - i;
        }
    }
}

fn lehmer_rank(one_line: &[u32]) -> usize {
    let n = one_line.len();
    let mut rank = 0;
    let mut fact: usize = (1..n).product::<usize>().max(1);
    for i in 0..n {
        let digit = one_line[i + 1..]
            .iter()
            .filter(|&&v| v < one_line[i])
            .count();
        rank += digit * fact;
        if n - 1 - i > 0 {
            fact /= n - 1 - i;
        }
    }
    rank
}

/// Sum of Lehmer digits of rank = the inversion count of the permutation.
fn lehmer_digit_sum(mut rank: usize, n: usize) -> u64 {
    let mut fact: usize = (1..n).product::<usize>().max(1);
    let mut sum = 0;
    for i in 0..n {
        sum += (rank / fact) as u64;
        rank %= fact;
        if n - 1 - i > 0 {
            fact /= n - 1 - i;
        }
    }
    sum
}

/// Exact route two: enumerate all 2^K subwords, weighting each by
/// p^kept (1-p)^dropped. Swaps only touch one-line positions between the
/// smallest and largest letter, so inversions are counted inside that window.
pub fn exact_expected_inversions_enum(w: &Word, p: f64) -> Result<f64> {
    check_closed_unit(p)?;
    let k = w.len();
    if k > 20 {
        return Err(Error::TooLarge {
            what: "subword enumeration",
            detail: format!("length {k} exceeds 20 (needs 2^K products)"),
        });
    }
    if k == 0 {
        return Ok(0.0);
    }
    let lo = w.letters.iter().min().unwrap() - 1; // 0-based window start
    let hi = *w.letters.iter().max().unwrap(); // 0-based window end, inclusive
    let m = hi - lo + 1;
    let window: Vec<usize> = w.letters.iter().map(|&i| i - 1 - lo).collect();

    let mut p_pow = vec![1.0f64; k + 1];
    let mut q_pow = vec![1.0f64; k + 1];
    for j in 1..=k {
        p_pow[j] = p_pow[j - 1] * p;
        q_pow[j] = q_pow[j - 1] * (1.0 - p);
    }

    let mut buf: Vec<u32> = Vec::with_capacity(m);
    let mut expectation = KahanSum::new();
    for mask in 0u32..1 << k {
        buf.clear();
        buf.extend(0..m as u32);
        let mut kept = 0;
        for (j, &pos) in window.iter().enumerate() {
            if mask >> j & 1 == 1 {
                buf.swap(pos, pos + 1);
                kept += 1;
            }
        }
        let mut inv = 0u64;
        for a in 0..m {
            for b in a + 1..m {
                inv += (buf[a] > buf[b]) as u64;
            }
        }
        expectation.add(p_pow[kept] * q_pow[k - kept] * inv as f64);
    }
    Ok(expectation.value())
}

/// A rectangular experiment result: named columns, numeric rows, and
/// reproducibility metadata.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub meta: BTreeMap<String, String>,
}

impl Table {
    fn new(columns: &[&str], meta: BTreeMap<String, String>) -> Table {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            meta,
        }
    }

    /// CSV with metadata as leading comment lines; numbers carry 17
    /// significant digits, enough to reproduce every f64 exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.meta {
            out.push_str(&format!("# {key} = {value}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// JSON object with columns, rows, meta; numbers serialize at full
    /// precision (shortest round-trip form).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

fn base_meta(p: f64, trials: u64, seed: u64) -> BTreeMap<String, String> {
    let mut meta = BTreeMap::new();
    meta.insert("p".into(), format!("{p}"));
    meta.insert("trials".into(), format!("{trials}"));
    meta.insert("seed".into(), format!("{seed}"));
    meta.insert("build".into(), BUILD_GIT_DESCRIBE.to_string());
    meta.insert(
        "note".into(),
        "finite-sample tolerances are calibration choices of this tool".into(),
    );
    meta
}

/// Staircase ratio experiment: for each n, the Monte Carlo mean on
/// staircase(n) and the ratio mean / (sqrt(p/(1-p)) n^{3/2}), next to the
/// limiting value [`staircase_limit_ratio`]. Row i draws from seed + i.
pub fn kappa_table(ns: &[usize], p: f64, trials: u64, seed: u64) -> Result<Table> {
    check_open_unit(p)?;
    if !ns.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(
            "staircase sizes must be strictly ascending".into(),
        ));
    }
    let mut table = Table::new(
        &["n", "mean", "stderr", "ratio", "ratio_stderr", "target"],
        base_meta(p, trials, seed),
    );
    table
        .meta
        .insert("sampling_mode".into(), SamplingMode::PerBox.as_str().into());
    let target = staircase_limit_ratio();
    for (i, &n) in ns.iter().enumerate() {
        let shape = Shape::staircase(n)?;
        let est = mc_expected_inversions(&shape, p, trials, seed.wrapping_add(i as u64))?;
        let denom = (p / (1.0 - p)).sqrt() * (n as f64).powf(1.5);
        table.rows.push(vec![
            n as f64,
            est.mean,
            est.stderr,
            est.mean / denom,
            est.stderr / denom,
            target,
        ]);
    }
    Ok(table)
}

/// First-kiss experiment: for each (ell, k), the empirical P(T <= k) for the
/// pipe pair, the empirical P(Psi_ell <= k) for the chain hitting time, and
/// the normal CDF approximation, with their differences. Initial facings are
/// drawn uniformly (the stationary law) per trial.
pub fn first_kiss_experiment(
    ells: &[u64],
    ks: &[u64],
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<Table> {
    check_open_unit(p)?;
    if trials < 1 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    for &ell in ells {
        if ell % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "gap must be even, got {ell}"
            )));
        }
    }
    let mut table = Table::new(
        &[
            "ell",
            "k",
            "pair_prob",
            "pair_stderr",
            "psi_prob",
            "psi_stderr",
            "cdf_approx",
            "pair_minus_psi",
            "pair_minus_cdf",
        ],
        base_meta(p, trials, seed),
    );
    let mut row_index = 0u64;
    for &ell in ells {
        for &k in ks {
            let stream_base = row_index * trials;
            let (pair_hits, psi_hits) = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(stream_base + t);
                    let init = PairState::sample_uniform(&mut rng).facings();
                    let pair = sample_first_kiss(ell, init, p, k, &mut rng)
                        .expect("validated arguments")
                        .is_some() as u64;
                    let psi = hitting_time_psi(ell as i64, p, PairInit::Uniform, k, &mut rng)
                        .expect("validated arguments")
                        .is_some() as u64;
                    (pair, psi)
                })
                .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
            let pair_prob = pair_hits as f64 / trials as f64;
            let psi_prob = psi_hits as f64 / trials as f64;
            let cdf = first_kiss_cdf_approx(ell as f64, k as f64, p);
            table.rows.push(vec![
                ell as f64,
                k as f64,
                pair_prob,
                proportion_stderr(pair_prob, trials),
                psi_prob,
                proportion_stderr(psi_prob, trials),
                cdf,
                pair_prob - psi_prob,
                pair_prob - cdf,
            ]);
            row_index += 1;
        }
    }
    Ok(table)
}

fn proportion_stderr(phat: f64, trials: u64) -> f64 {
    (phat * (1.0 - phat) / trials as f64).sqrt()
}

/// Default constants for the veer bound, calibrated so the bound dominates
/// the empirical tail across the tested grids with a comfortable margin: the
/// true tail decays like exp(-z^2 (1-p) / (2 r p)) in the diffusive regime
/// and z^2/(z+r) <= z^2/r, so C2 = (1-p)/(4p) keeps the exponent smaller
/// than the truth and C1 = 4 covers the reflection prefactor.
pub fn default_veer_constants(p: f64) -> (f64, f64) {
    (4.0, (1.0 - p) / (4.0 * p))
}

/// Concentration experiment: empirical P(T(z) <= r), the chance a single
/// pipe veers z diagonals off its start within r steps, next to the
/// closed-form bound with [`default_veer_constants`]. The initial facing is
/// fixed east; the law of |d| does not depend on it.
pub fn concentration_experiment(
    zs: &[u64],
    rs: &[u64],
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<Table> {
    check_open_unit(p)?;
    if trials < 1 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let (c1, c2) = default_veer_constants(p);
    let mut meta = base_meta(p, trials, seed);
    meta.insert("veer_c1".into(), format!("{c1}"));
    meta.insert("veer_c2".into(), format!("{c2}"));
    let mut table = Table::new(&["z", "r", "empirical", "stderr", "bound"], meta);
    let mut row_index = 0u64;
    for &z in zs {
        for &r in rs {
            let bound = veer_bound(z as f64, r as f64, c1, c2)?;
            let stream_base = row_index * trials;
            let hits: u64 = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(stream_base + t);
                    first_passage_within(z, r, p, &mut rng) as u64
                })
                .sum();
            let phat = hits as f64 / trials as f64;
            table.rows.push(vec![
                z as f64,
                r as f64,
                phat,
                proportion_stderr(phat, trials),
                bound,
            ]);
            row_index += 1;
        }
    }
    Ok(table)
}

/// Does |d(t) - d(0)| reach z within r steps?
fn first_passage_within(z: u64, r: u64, p: f64, rng: &mut impl Rng) -> bool {
    if z == 0 {
        return true;
    }
    let mut d = 0i64;
    let mut east = true;
    for _ in 0..r {
        d += if east { 1 } else { -1 };
        if d.unsigned_abs() >= z {
            return true;
        }
        if !bernoulli(p, rng) {
            east = !east;
        }
    }
    false
}

/// Tail experiment for turn-time sums: the k-th turn time is a sum of k
/// geometric gaps with success 1-p and mean k/(1-p). For each k and each
/// xi = frac * k the empirical P(|sum - mean| >= xi) sits next to the
/// closed-form bound, which must dominate it.
pub fn chernoff_experiment(
    ks: &[u64],
    xi_over_k: &[f64],
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<Table> {
    check_open_unit(p)?;
    if trials < 1 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let mut table = Table::new(
        &["k", "xi", "empirical", "stderr", "bound"],
        base_meta(p, trials, seed),
    );
    for (ki, &k) in ks.iter().enumerate() {
        if k < 1 {
            return Err(Error::InvalidArgument("need k >= 1".into()));
        }
        let mean = k as f64 / (1.0 - p);
        let stream_base = ki as u64 * trials;
        // One set of turn-time samples per k, shared across the xi grid.
        let deviations: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(stream_base + t);
                let mut sum = 0u64;
                for _ in 0..k {
                    sum += sample_geometric(1.0 - p, &mut rng);
                }
                (sum as f64 - mean).abs()
            })
            .collect();
        for &frac in xi_over_k {
            let xi = frac * k as f64;
            let bound = chernoff_bound(k, xi, p)?;
            let hits = deviations.iter().filter(|&&d| d >= xi).count() as u64;
            let phat = hits as f64 / trials as f64;
            table.rows.push(vec![
                k as f64,
                xi,
                phat,
                proportion_stderr(phat, trials),
                bound,
            ]);
        }
    }
    Ok(table)
}

/// Checks that a pipe is, at its k-th turn, at least as likely as not to sit
/// on the far side of where it started (give or take one diagonal): the
/// empirical frequency of delta (d(tau_k) - d(0)) >= -1 must stay above
/// 0.5 - 3 stderr, for delta = +1 started east and delta = -1 started north.
pub fn half_check(ks: &[u64], p: f64, trials: u64, seed: u64) -> Result<Table> {
    check_open_unit(p)?;
    if trials < 1 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let mut table = Table::new(
        &["k", "delta", "frequency", "stderr", "pass"],
        base_meta(p, trials, seed),
    );
    let mut row_index = 0u64;
    for &k in ks {
        if k < 1 {
            return Err(Error::InvalidArgument("need k >= 1".into()));
        }
        for &east in &[true, false] {
            let delta = if east { 1.0 } else { -1.0 };
            let stream_base = row_index * trials;
            // Far more steps than the k-th turn ever needs; a capped-out
            // trial counts as a failure and is effectively impossible.
            let cap = 200 * (k as f64 / (1.0 - p)).ceil() as u64 + 10_000;
            let hits: u64 = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(stream_base + t);
                    match d_at_kth_turn(k, p, east, cap, &mut rng) {
                        Some(d) => (delta * d as f64 >= -1.0) as u64,
                        None => 0,
                    }
                })
                .sum();
            let phat = hits as f64 / trials as f64;
            let stderr = proportion_stderr(phat, trials);
            let pass = (phat >= 0.5 - 3.0 * stderr) as u64 as f64;
            table
                .rows
                .push(vec![k as f64, delta, phat, stderr, pass]);
            row_index += 1;
        }
    }
    Ok(table)
}

/// Position d(tau_k) at the k-th turn; `None` if the cap is hit first.
fn d_at_kth_turn(k: u64, p: f64, east0: bool, cap: u64, rng: &mut impl Rng) -> Option<i64> {
    let mut d = 0i64;
    let mut east = east0;
    let mut turns = 0;
    for _ in 0..cap {
        d += if east { 1 } else { -1 };
        if !bernoulli(p, rng) {
            east = !east;
            turns += 1;
            if turns == k {
                return Some(d);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn word(n: usize, letters: &[usize]) -> Word {
        Word::new(n, letters.to_vec()).unwrap()
    }

    #[test]
    fn prediction_single_box_and_monotonicity() {
        let shape = Shape::staircase(2).unwrap();
        assert_abs_diff_eq!(
            predicted_inversions(&shape, 0.5).unwrap(),
            (2.0 / PI).sqrt(),
            epsilon = 1e-12
        );
        let bigger = Shape::staircase(7).unwrap();
        let mut prev = 0.0;
        for i in 1..=9 {
            let p = i as f64 * 0.1;
            let value = predicted_inversions(&bigger, p).unwrap();
            assert!(value > prev);
            prev = value;
        }
        assert!(predicted_inversions(&shape, 0.0).is_err());
    }

    #[test]
    fn limit_ratios() {
        assert_abs_diff_eq!(staircase_limit_ratio(), 0.531924, epsilon = 1e-6);
        assert_abs_diff_eq!(strip_limit_ratio(), 0.5641896, epsilon = 1e-7);
    }

    #[test]
    fn exact_oracles_pinned_values() {
        for p in [0.0, 0.3, 0.5, 1.0] {
            assert_eq!(exact_expected_inversions(&word(3, &[]), p).unwrap(), 0.0);
            assert_abs_diff_eq!(
                exact_expected_inversions(&word(2, &[1]), p).unwrap(),
                p,
                epsilon = 1e-15
            );
        }
        let w = word(3, &[2, 1, 2]);
        assert_abs_diff_eq!(
            exact_expected_inversions_dp(&w, 0.5).unwrap(),
            1.25,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            exact_expected_inversions_enum(&w, 0.5).unwrap(),
            1.25,
            epsilon = 1e-12
        );
    }

    #[test]
    fn exact_routes_agree_on_random_words() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let n = rng.random_range(2..=5);
            let len = rng.random_range(0..=10);
            let letters: Vec<usize> = (0..len).map(|_| rng.random_range(1..n)).collect();
            let w = word(n, &letters);
            let p: f64 = rng.random();
            let dp = exact_expected_inversions_dp(&w, p).unwrap();
            let en = exact_expected_inversions_enum(&w, p).unwrap();
            assert!((dp - en).abs() <= 1e-12, "{letters:?} p={p}: {dp} vs {en}");
        }
    }

    #[test]
    fn exact_size_limits() {
        let long = word(2, &vec![1; 21]);
        assert!(exact_expected_inversions_enum(&long, 0.5).is_err());
        assert!(exact_expected_inversions(&long, 0.5).is_ok()); // n = 2 DP
        let wide = word(9, &[1]);
        assert!(exact_expected_inversions_dp(&wide, 0.5).is_err());
        assert!(exact_expected_inversions(&wide, 0.5).is_ok()); // short: enum
    }

    #[test]
    fn mc_deterministic_and_exact_at_p_one() {
        let shape = Shape::staircase(5).unwrap();
        let est = mc_expected_inversions(&shape, 1.0, 50, 11).unwrap();
        assert_eq!(est.mean, 10.0);
        assert_eq!(est.stderr, 0.0);
        assert_eq!(est.variance, 0.0);
        assert!(est.ratio.is_none());

        let zero = mc_expected_inversions(&shape, 0.0, 50, 11).unwrap();
        assert_eq!(zero.mean, 0.0);

        let a = mc_expected_inversions(&shape, 0.37, 4000, 99).unwrap();
        let b = mc_expected_inversions(&shape, 0.37, 4000, 99).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn mc_single_box_matches_bernoulli() {
        let shape = Shape::staircase(2).unwrap();
        let est = mc_expected_inversions(&shape, 0.7, 40_000, 5).unwrap();
        assert!(
            (est.mean - 0.7).abs() <= 4.0 * est.stderr,
            "mean {} stderr {}",
            est.mean,
            est.stderr
        );
        assert!(est.ratio.unwrap() > 0.0);
    }

    #[test]
    fn mc_matches_dp_oracle() {
        let shape = Shape::staircase(5).unwrap();
        let w = crate::word::staircase_word(5).unwrap();
        let exact = exact_expected_inversions_dp(&w, 0.5).unwrap();
        let est = mc_expected_inversions(&shape, 0.5, 30_000, 42).unwrap();
        assert!(
            (est.mean - exact).abs() <= 3.0 * est.stderr,
            "mc {} vs exact {exact} (stderr {})",
            est.mean,
            est.stderr
        );
    }

    #[test]
    fn geometric_skip_agrees_in_distribution() {
        let shape = Shape::staircase(6).unwrap();
        for p in [0.15, 0.85] {
            let per_box =
                mc_expected_inversions_with_mode(&shape, p, 30_000, 3, SamplingMode::PerBox)
                    .unwrap();
            let skip =
                mc_expected_inversions_with_mode(&shape, p, 30_000, 4, SamplingMode::GeometricSkip)
                    .unwrap();
            let tolerance = 4.0 * (per_box.stderr.powi(2) + skip.stderr.powi(2)).sqrt();
            assert!(
                (per_box.mean - skip.mean).abs() <= tolerance,
                "p={p}: {} vs {}",
                per_box.mean,
                skip.mean
            );
        }
        // Degenerate p short-circuits regardless of mode.
        let all =
            mc_expected_inversions_with_mode(&shape, 1.0, 10, 0, SamplingMode::GeometricSkip)
                .unwrap();
        assert_eq!(all.mean, 15.0);
    }

    #[test]
    fn non_convex_shape_is_rejected() {
        let shape = Shape::from_boxes(3, &[(1, -1), (2, 0)]).unwrap();
        assert!(matches!(
            mc_expected_inversions(&shape, 0.5, 10, 0),
            Err(Error::NotOrderConvex { .. })
        ));
    }

    #[test]
    fn kappa_table_structure() {
        let table = kappa_table(&[2, 3], 0.5, 3000, 17).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert_eq!(table.columns[3], "ratio");
        for row in &table.rows {
            assert_abs_diff_eq!(row[5], 0.531924, epsilon = 1e-6);
            assert!(row[3] > 0.0 && row[3] < 1.2);
        }
        // One box: mean is exactly Bernoulli(p), ratio = mean / 2^{3/2}.
        let first = &table.rows[0];
        assert_abs_diff_eq!(first[3], first[1] / 2.0f64.powf(1.5), epsilon = 1e-12);
        assert!(kappa_table(&[3, 2], 0.5, 10, 0).is_err());
    }

    #[test]
    fn first_kiss_table_degenerate_row() {
        let table = first_kiss_experiment(&[0, 2], &[16], 0.5, 2000, 23).unwrap();
        assert_eq!(table.rows.len(), 2);
        let zero = &table.rows[0];
        assert_eq!(zero[2], 1.0); // pair empirical, exactly
        assert_eq!(zero[4], 1.0); // psi empirical, exactly
        assert!((zero[6] - 1.0).abs() < 1e-7); // cdf approx at ell = 0
        let apart = &table.rows[1];
        assert!(apart[2] > 0.0 && apart[2] < 1.0);
        assert!(first_kiss_experiment(&[1], &[4], 0.5, 10, 0).is_err());
    }

    #[test]
    fn concentration_table_bounds_dominate() {
        let table = concentration_experiment(&[4, 8], &[16], 0.5, 4000, 31).unwrap();
        for row in &table.rows {
            let (empirical, bound) = (row[2], row[4]);
            assert!(
                empirical <= bound,
                "z={} r={}: {empirical} > {bound}",
                row[0],
                row[1]
            );
        }
        assert!(concentration_experiment(&[1], &[16], 0.5, 10, 0).is_err());
    }

    #[test]
    fn chernoff_table_bounds_dominate() {
        let table = chernoff_experiment(&[10], &[0.25, 0.5], 0.5, 5000, 13).unwrap();
        assert_eq!(table.rows.len(), 2);
        for row in &table.rows {
            assert!(row[2] <= row[4], "empirical {} > bound {}", row[2], row[4]);
        }
    }

    #[test]
    fn half_check_passes_at_small_k() {
        let table = half_check(&[2], 0.5, 5000, 29).unwrap();
        assert_eq!(table.rows.len(), 2);
        for row in &table.rows {
            assert_eq!(row[4], 1.0, "delta {} frequency {}", row[1], row[2]);
        }
    }

    #[test]
    fn table_formats() {
        let table = chernoff_experiment(&[5], &[0.5], 0.5, 500, 3).unwrap();
        let csv = table.to_csv();
        assert!(csv.contains("# seed = 3"));
        assert!(csv.contains("k,xi,empirical,stderr,bound"));
        assert!(csv.lines().last().unwrap().contains('e'));
        let json = table.to_json();
        assert!(json.contains("\"columns\""));
        assert!(json.contains("\"build\""));
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["rows"][0].as_array().unwrap().len(), 5);
    }
}
