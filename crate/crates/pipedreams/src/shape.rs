//! Shapes: finite sets of unit boxes indexed by (x, y) with x >= y, together
//! with the structure the rest of the crate leans on: diagonals, levels, the
//! product order, order-convexity, serration, and linear extensions.
//!
//! The box b(x, y) sits on diagonal d = x - y (1 <= d <= n-1 for rank n) and
//! level x + y. Level and diagonal always share a parity. The product order
//! b <= b' means x <= x' and y <= y'; a shape is order-convex when it contains
//! every in-rank box lying between two of its boxes in that order.
//!
//! Standard families (staircases, strips) are stored as one contiguous level
//! run per diagonal, so membership is O(1) and a shape with millions of boxes
//! costs O(n) memory. Shapes built from explicit box lists store sorted
//! coordinates instead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::Word;

/// Largest bounding-rectangle area the dominance sweeps will allocate flags
/// for. Shapes of interest stay far below this; the guard exists so a custom
/// shape with absurd coordinates fails loudly instead of exhausting memory.
const MAX_SWEEP_AREA: i64 = 1 << 31;

/// A unit box b(x, y). Coordinates may be negative; only the rank condition
/// 1 <= x - y <= n-1 ties a box to a shape of rank n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoxCoord {
    pub x: i64,
    pub y: i64,
}

impl BoxCoord {
    pub fn new(x: i64, y: i64) -> Self {
        BoxCoord { x, y }
    }

    /// Diagonal index d = x - y.
    pub fn diagonal(self) -> i64 {
        self.x - self.y
    }

    /// Level x + y; strictly increasing along any product-order chain.
    pub fn level(self) -> i64 {
        self.x + self.y
    }

    /// Product order: self dominates other when both coordinates do.
    pub fn dominates(self, other: BoxCoord) -> bool {
        self.x >= other.x && self.y >= other.y
    }

    fn canonical_key(self) -> (i64, i64) {
        (self.level(), self.diagonal())
    }
}

impl std::fmt::Display for BoxCoord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "b({}, {})", self.x, self.y)
    }
}

/// How a shape was built. Provenance only: equality of shapes compares n and
/// the box set, never the family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeFamily {
    Staircase,
    Strip,
    FromWord,
    Custom,
}

/// One diagonal's boxes as a contiguous run of levels lo, lo+2, .., hi.
/// Empty when lo > hi. Valid runs keep lo ≡ hi ≡ d (mod 2).
#[derive(Debug, Clone, Copy)]
struct DiagRun {
    lo: i64,
    hi: i64,
}

impl DiagRun {
    const EMPTY: DiagRun = DiagRun { lo: 1, hi: -1 };

    fn is_empty(self) -> bool {
        self.lo > self.hi
    }

    fn len(self) -> u64 {
        if self.is_empty() {
            0
        } else {
            ((self.hi - self.lo) / 2 + 1) as u64
        }
    }
}

#[derive(Debug, Clone)]
enum Store {
    /// One level run per diagonal; index d-1 holds diagonal d.
    Runs(Vec<DiagRun>),
    /// Boxes sorted by (level, diagonal), no duplicates.
    Explicit(Vec<BoxCoord>),
}

/// A finite set of boxes of rank n.
#[derive(Debug, Clone)]
pub struct Shape {
    n: usize,
    family: ShapeFamily,
    store: Store,
}

/// On-disk form: {"n": int, "boxes": [[x, y], ...]}.
#[derive(Serialize, Deserialize)]
struct ShapeFile {
    n: usize,
    boxes: Vec<(i64, i64)>,
}

impl PartialEq for Shape {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.boxes().eq(other.boxes())
    }
}

impl Eq for Shape {}

impl Shape {
    /// The staircase of rank n: all boxes with x >= 1, y <= 0, x - y <= n-1.
    /// Diagonal d holds d boxes, n(n-1)/2 in total.
    pub fn staircase(n: usize) -> Result<Shape> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "staircase needs n >= 2, got {n}"
            )));
        }
        // Diagonal d: x in 1..=d, so levels 2-d, 4-d, .., d.
        let runs = (1..n as i64)
            .map(|d| DiagRun { lo: 2 - d, hi: d })
            .collect();
        Ok(Shape {
            n,
            family: ShapeFamily::Staircase,
            store: Store::Runs(runs),
        })
    }

    /// The strip of rank n with rho layers: the shape of the bipartite word
    /// (odd letters then even letters, repeated rho times). Every diagonal
    /// holds exactly rho boxes.
    pub fn strip(n: usize, rho: usize) -> Result<Shape> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "strip needs n >= 3, got {n}"
            )));
        }
        if rho < 1 {
            return Err(Error::InvalidArgument("strip needs rho >= 1".into()));
        }
        // Odd diagonals stack levels 1, 3, .., 2*rho-1; even ones 2, 4, ..,
        // 2*rho. Matches the heap of the bipartite word, which the tests check.
        let rho = rho as i64;
        let runs = (1..n as i64)
            .map(|d| {
                if d % 2 == 1 {
                    DiagRun { lo: 1, hi: 2 * rho - 1 }
                } else {
                    DiagRun { lo: 2, hi: 2 * rho }
                }
            })
            .collect();
        Ok(Shape {
            n,
            family: ShapeFamily::Strip,
            store: Store::Runs(runs),
        })
    }

    /// Builds the heap of an alternating word as an order-convex shape.
    ///
    /// In any order-convex placement the boxes of diagonal i occupy a run of
    /// consecutive levels b_i, b_i+2, .. and boxes on adjacent diagonals are
    /// always comparable, so letter order must equal level order there. The
    /// alternation of the (i, i+1)-restriction then forces the bases of two
    /// neighbouring occupied diagonals to differ by exactly 1, the lower one
    /// belonging to whichever letter occurs first. That fixes the placement
    /// up to one anchor per block of consecutively occupied diagonals; blocks
    /// are anchored so their facing edge boxes stay incomparable, which is
    /// what convexity demands across a gap. Greedily dropping each box as low
    /// as its predecessors allow, by contrast, can tear a diagonal's run
    /// apart and lose convexity ([4,1,2,3,4] is a witness).
    ///
    /// Returns the shape, translated so its minimal level is 0 or 1, together
    /// with the linear extension listing boxes in letter order; the word of
    /// that extension is exactly `w`. Convexity of the result is re-checked
    /// and an error names a witness box if it ever fails.
    pub fn from_word(w: &Word) -> Result<(Shape, LinearExtension)> {
        w.check_alternating()?;
        let n = w.n;
        let mut count = vec![0i64; n];
        let mut first = vec![usize::MAX; n];
        for (pos, &letter) in w.letters.iter().enumerate() {
            if count[letter] == 0 {
                first[letter] = pos;
            }
            count[letter] += 1;
        }
        let mut base = vec![0i64; n];
        let mut prev: Option<usize> = None;
        for i in 1..n {
            if count[i] == 0 {
                continue;
            }
            base[i] = match prev {
                None => i as i64 % 2,
                Some(j) if j + 1 == i => {
                    if first[j] < first[i] {
                        base[j] + 1
                    } else {
                        base[j] - 1
                    }
                }
                // New block: any offset smaller in magnitude than the diagonal
                // gap keeps the edges incomparable; this one also fixes parity.
                Some(j) => base[j] + (i - j) as i64 % 2,
            };
            prev = Some(i);
        }
        let min_level = (1..n)
            .filter(|&i| count[i] > 0)
            .map(|i| base[i])
            .min()
            .unwrap_or(0);
        let shift = 2 * -min_level.div_euclid(2);
        let mut seen = vec![0i64; n];
        let mut order: Vec<BoxCoord> = Vec::with_capacity(w.len());
        for &letter in &w.letters {
            let i = letter as i64;
            let level = base[letter] + 2 * seen[letter] + shift;
            seen[letter] += 1;
            order.push(BoxCoord::new((level + i) / 2, (level - i) / 2));
        }
        let mut boxes = order.clone();
        boxes.sort_by_key(|b| b.canonical_key());
        let shape = Shape {
            n,
            family: ShapeFamily::FromWord,
            store: Store::Explicit(boxes),
        };
        if let Some(v) = shape.convexity_violation() {
            return Err(Error::NotOrderConvex { x: v.x, y: v.y });
        }
        Ok((shape, LinearExtension { n, order }))
    }

    /// A shape from an explicit box list. Rejects duplicates and boxes whose
    /// diagonal falls outside 1..=n-1.
    pub fn from_boxes(n: usize, coords: &[(i64, i64)]) -> Result<Shape> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "shape rank needs n >= 2, got {n}"
            )));
        }
        let mut boxes: Vec<BoxCoord> = Vec::with_capacity(coords.len());
        for &(x, y) in coords {
            let b = BoxCoord::new(x, y);
            let d = b.diagonal();
            if d < 1 || d > n as i64 - 1 {
                return Err(Error::DiagonalOutOfRange {
                    x,
                    y,
                    d,
                    max: n as i64 - 1,
                });
            }
            boxes.push(b);
        }
        boxes.sort_by_key(|b| b.canonical_key());
        for pair in boxes.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateBox {
                    x: pair[0].x,
                    y: pair[0].y,
                });
            }
        }
        Ok(Shape {
            n,
            family: ShapeFamily::Custom,
            store: Store::Explicit(boxes),
        })
    }

    pub fn from_json(text: &str) -> Result<Shape> {
        let file: ShapeFile =
            serde_json::from_str(text).map_err(|e| Error::Malformed(format!("shape file: {e}")))?;
        Shape::from_boxes(file.n, &file.boxes)
    }

    /// Serializes as {"n", "boxes"} with boxes in canonical order. Materializes
    /// the box list, so intended for shapes one would plausibly put in a file.
    pub fn to_json(&self) -> String {
        let file = ShapeFile {
            n: self.n,
            boxes: self.boxes().map(|b| (b.x, b.y)).collect(),
        };
        serde_json::to_string(&file).expect("shape serialization cannot fail")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> ShapeFamily {
        self.family
    }

    pub fn box_count(&self) -> u64 {
        match &self.store {
            Store::Runs(runs) => runs.iter().map(|r| r.len()).sum(),
            Store::Explicit(boxes) => boxes.len() as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.box_count() == 0
    }

    pub fn contains(&self, b: BoxCoord) -> bool {
        let d = b.diagonal();
        if d < 1 || d > self.n as i64 - 1 {
            return false;
        }
        match &self.store {
            Store::Runs(runs) => {
                let run = runs[(d - 1) as usize];
                let l = b.level();
                run.lo <= l && l <= run.hi
            }
            Store::Explicit(boxes) => boxes
                .binary_search_by_key(&b.canonical_key(), |c| c.canonical_key())
                .is_ok(),
        }
    }

    /// Iterates boxes in canonical order: level ascending, then diagonal
    /// ascending. Lazy for run-stored shapes, so iterating a large staircase
    /// allocates nothing.
    pub fn boxes(&self) -> Boxes<'_> {
        match &self.store {
            Store::Runs(runs) => {
                let lo = runs.iter().filter(|r| !r.is_empty()).map(|r| r.lo).min();
                let hi = runs.iter().filter(|r| !r.is_empty()).map(|r| r.hi).max();
                Boxes(BoxesInner::Runs {
                    runs,
                    level: lo.unwrap_or(0),
                    hi_level: hi.unwrap_or(-1),
                    diag: 1,
                })
            }
            Store::Explicit(boxes) => Boxes(BoxesInner::Explicit(boxes.iter())),
        }
    }

    /// O_i for i in 1..=n-1, as a vector indexed by i-1.
    pub fn diagonal_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.n - 1];
        match &self.store {
            Store::Runs(runs) => {
                for (k, run) in runs.iter().enumerate() {
                    counts[k] = run.len();
                }
            }
            Store::Explicit(boxes) => {
                for b in boxes {
                    counts[(b.diagonal() - 1) as usize] += 1;
                }
            }
        }
        counts
    }

    pub fn min_level(&self) -> Option<i64> {
        match &self.store {
            Store::Runs(runs) => runs.iter().filter(|r| !r.is_empty()).map(|r| r.lo).min(),
            Store::Explicit(boxes) => boxes.first().map(|b| b.level()),
        }
    }

    pub fn max_level(&self) -> Option<i64> {
        match &self.store {
            Store::Runs(runs) => runs.iter().filter(|r| !r.is_empty()).map(|r| r.hi).max(),
            Store::Explicit(boxes) => boxes.last().map(|b| b.level()),
        }
    }

    fn bounds(&self) -> Option<(i64, i64, i64, i64)> {
        let mut acc: Option<(i64, i64, i64, i64)> = None;
        let mut extend = |xlo: i64, xhi: i64, ylo: i64, yhi: i64| {
            acc = Some(match acc {
                None => (xlo, xhi, ylo, yhi),
                Some((a, b, c, d)) => (a.min(xlo), b.max(xhi), c.min(ylo), d.max(yhi)),
            });
        };
        match &self.store {
            Store::Runs(runs) => {
                for (k, run) in runs.iter().enumerate() {
                    if run.is_empty() {
                        continue;
                    }
                    let d = k as i64 + 1;
                    extend(
                        (run.lo + d) / 2,
                        (run.hi + d) / 2,
                        (run.lo - d) / 2,
                        (run.hi - d) / 2,
                    );
                }
            }
            Store::Explicit(boxes) => {
                for b in boxes {
                    extend(b.x, b.x, b.y, b.y);
                }
            }
        }
        acc
    }

    /// True when every in-rank box between two boxes of the shape (in the
    /// product order) belongs to the shape.
    pub fn is_order_convex(&self) -> bool {
        self.convexity_violation().is_none()
    }

    /// A box witnessing the failure of order-convexity, if any: a missing
    /// in-rank box that dominates some box of the shape and is dominated by
    /// another. Runs two dominance sweeps over the bounding rectangle, O(area).
    ///
    /// Panics if the bounding rectangle exceeds 2^31 cells; such shapes are
    /// outside the intended working range.
    pub fn convexity_violation(&self) -> Option<BoxCoord> {
        let (xlo, xhi, ylo, yhi) = self.bounds()?;
        let w = xhi - xlo + 1;
        let h = yhi - ylo + 1;
        assert!(
            w.checked_mul(h).is_some_and(|a| a <= MAX_SWEEP_AREA),
            "convexity sweep over {w} x {h} bounding rectangle is too large"
        );
        let (w, h) = (w as usize, h as usize);
        let idx = |x: i64, y: i64| (x - xlo) as usize * h + (y - ylo) as usize;

        // below[b]: some box of the shape is <= b. Sweep with both coordinates
        // ascending so the west and south neighbours are already final.
        let mut below = vec![false; w * h];
        for x in xlo..=xhi {
            for y in ylo..=yhi {
                let f = self.contains(BoxCoord::new(x, y))
                    || (x > xlo && below[idx(x - 1, y)])
                    || (y > ylo && below[idx(x, y - 1)]);
                below[idx(x, y)] = f;
            }
        }
        // above[b]: some box of the shape is >= b. Same sweep, reversed.
        let mut above = vec![false; w * h];
        for x in (xlo..=xhi).rev() {
            for y in (ylo..=yhi).rev() {
                let f = self.contains(BoxCoord::new(x, y))
                    || (x < xhi && above[idx(x + 1, y)])
                    || (y < yhi && above[idx(x, y + 1)]);
                above[idx(x, y)] = f;
            }
        }
        for x in xlo..=xhi {
            for y in ylo..=yhi {
                let b = BoxCoord::new(x, y);
                let d = b.diagonal();
                if d >= 1
                    && d <= self.n as i64 - 1
                    && below[idx(x, y)]
                    && above[idx(x, y)]
                    && !self.contains(b)
                {
                    return Some(b);
                }
            }
        }
        None
    }

    /// True when, with c the minimal level of the shape, every in-rank box at
    /// level c (necessarily on a diagonal of c's parity) is present. The empty
    /// shape is not serrated.
    pub fn is_serrated(&self) -> bool {
        let Some(c) = self.min_level() else {
            return false;
        };
        // First diagonal of c's parity; rem_euclid handles negative levels.
        let mut d = if c.rem_euclid(2) == 0 { 2 } else { 1 };
        while d <= self.n as i64 - 1 {
            let b = BoxCoord::new((c + d) / 2, (c - d) / 2);
            if !self.contains(b) {
                return false;
            }
            d += 2;
        }
        true
    }

    /// The linear extension sorting boxes by (level, diagonal). Level is
    /// strictly monotone along product-order chains, so any level sort is a
    /// valid extension.
    pub fn canonical_linear_extension(&self) -> LinearExtension {
        LinearExtension {
            n: self.n,
            order: self.boxes().collect(),
        }
    }

    /// The shape translated by (t, t): diagonals unchanged, levels shifted by
    /// 2t. Tagged custom since the family labels describe construction.
    pub fn translate(&self, t: i64) -> Shape {
        let store = match &self.store {
            Store::Runs(runs) => Store::Runs(
                runs.iter()
                    .map(|r| {
                        if r.is_empty() {
                            DiagRun::EMPTY
                        } else {
                            DiagRun { lo: r.lo + 2 * t, hi: r.hi + 2 * t }
                        }
                    })
                    .collect(),
            ),
            Store::Explicit(boxes) => Store::Explicit(
                boxes
                    .iter()
                    .map(|b| BoxCoord::new(b.x + t, b.y + t))
                    .collect(),
            ),
        };
        Shape {
            n: self.n,
            family: ShapeFamily::Custom,
            store,
        }
    }

    /// Translates so the minimal level lands in {0, 1}. Shapes that agree up
    /// to translation along the main diagonal normalize to equal shapes.
    pub fn normalized(&self) -> Shape {
        match self.min_level() {
            None => self.clone(),
            Some(m) => self.translate(-m.div_euclid(2)),
        }
    }

    /// Size diagnostics against the thresholds the asymptotic statements are
    /// phrased in: the largest diagonal count, the number of diagonals at or
    /// below n^(2*epsilon), and the largest count relative to n^2/ln^(1+eps) n.
    pub fn hypothesis_report(&self, epsilon: f64) -> Result<ShapeDiagnostics> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in (0, 0.5), got {epsilon}"
            )));
        }
        let counts = self.diagonal_counts();
        let max_count = counts.iter().copied().max().unwrap_or(0);
        let n = self.n as f64;
        let small_cutoff = n.powf(2.0 * epsilon);
        let small_diagonals = counts.iter().filter(|&&c| (c as f64) <= small_cutoff).count();
        let ratio_max = max_count as f64 / (n * n / n.ln().powf(1.0 + epsilon));
        Ok(ShapeDiagnostics {
            n: self.n,
            epsilon,
            box_count: self.box_count(),
            max_diagonal_count: max_count,
            small_cutoff,
            small_diagonals,
            ratio_max,
        })
    }
}

/// Canonical-order box iterator; see [`Shape::boxes`].
pub struct Boxes<'a>(BoxesInner<'a>);

enum BoxesInner<'a> {
    Runs {
        runs: &'a [DiagRun],
        level: i64,
        hi_level: i64,
        diag: i64,
    },
    Explicit(std::slice::Iter<'a, BoxCoord>),
}

impl Iterator for Boxes<'_> {
    type Item = BoxCoord;

    fn next(&mut self) -> Option<BoxCoord> {
        match &mut self.0 {
            BoxesInner::Explicit(it) => it.next().copied(),
            BoxesInner::Runs { runs, level, hi_level, diag } => {
                while *level <= *hi_level {
                    while *diag <= runs.len() as i64 {
                        let d = *diag;
                        *diag += 1;
                        // Parity filter: diagonal d only holds levels of d's
                        // parity.
                        if (*level - d) % 2 != 0 {
                            continue;
                        }
                        let run = runs[(d - 1) as usize];
                        if run.lo <= *level && *level <= run.hi {
                            return Some(BoxCoord::new((*level + d) / 2, (*level - d) / 2));
                        }
                    }
                    *level += 1;
                    *diag = 1;
                }
                None
            }
        }
    }
}

/// An enumeration of a shape's boxes consistent with the product order:
/// whenever b <= b', b comes first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearExtension {
    n: usize,
    order: Vec<BoxCoord>,
}

impl LinearExtension {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn boxes(&self) -> &[BoxCoord] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// The word reading off each box's diagonal in order.
    pub fn word(&self) -> Word {
        let letters = self.order.iter().map(|b| b.diagonal() as usize).collect();
        Word::new(self.n, letters).expect("extension boxes carry in-rank diagonals")
    }

    /// Checks the defining property pairwise; quadratic, test support only.
    pub fn is_valid(&self) -> bool {
        for (k, b) in self.order.iter().enumerate() {
            for later in &self.order[k + 1..] {
                if later != b && b.dominates(*later) {
                    return false;
                }
            }
        }
        true
    }
}

/// See [`Shape::hypothesis_report`].
#[derive(Debug, Clone, Serialize)]
pub struct ShapeDiagnostics {
    pub n: usize,
    pub epsilon: f64,
    pub box_count: u64,
    pub max_diagonal_count: u64,
    pub small_cutoff: f64,
    pub small_diagonals: usize,
    pub ratio_max: f64,
}
