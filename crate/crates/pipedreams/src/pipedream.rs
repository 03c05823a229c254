//! Random pipe dreams: cross/bump tilings of a shape, and the pipes they
//! route.
//!
//! Each box of a shape holds either a cross tile (the two pipes through the
//! box keep their headings) or a bump tile (both turn). Pipes enter along the
//! southwest boundary, move north and east, and leave along the northeast
//! boundary; where two boxes of the same extreme diagonal meet corner to
//! corner, a boundary elbow carries the pipe from one to the other. Reading
//! off which pipe leaves at which exit yields the permutation the tiling
//! represents.
//!
//! The permutation can be computed two independent ways: algebraically, by
//! multiplying the adjacent transpositions of the cross boxes in linear
//! extension order ([`PipeDream::permutation_product`]), or geometrically, by
//! tracing every pipe through the tiles ([`PipeDream::trace`]). The algebraic
//! route is the fast one; the trace also reports pipe paths, lengths, and
//! per-pair contact statistics, and the two must always agree.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shape::{BoxCoord, Shape};
use crate::word::{bernoulli, Perm};

/// A side of a box. Pipes enter boxes from the west or south and leave to the
/// north or east.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    West,
    South,
    North,
    East,
}

/// A directed edge of the routing: the given side of the given box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeRef {
    pub at: BoxCoord,
    pub side: Side,
}

/// One box traversal of a pipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Visit {
    pub at: BoxCoord,
    /// West or South.
    pub enters: Side,
    /// North or East.
    pub leaves: Side,
}

/// A tiling of a shape. `cross[k]` is the tile of the k-th box in canonical
/// order: true for a cross, false for a bump.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipeDream {
    shape: Shape,
    cross: Vec<bool>,
}

/// On-disk form: the shape plus 0/1 tile flags in canonical box order.
#[derive(Serialize, Deserialize)]
struct PipeDreamFile {
    shape: ShapeField,
    cross: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
struct ShapeField {
    n: usize,
    boxes: Vec<(i64, i64)>,
}

impl PipeDream {
    /// Fills each box with a cross independently with probability p, drawing
    /// one uniform variate per box in canonical order. Deterministic given the
    /// RNG state.
    pub fn sample(shape: &Shape, p: f64, rng: &mut impl Rng) -> Result<PipeDream> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "cross probability must lie in [0, 1], got {p}"
            )));
        }
        let cross = shape.boxes().map(|_| bernoulli(p, rng)).collect();
        Ok(PipeDream {
            shape: shape.clone(),
            cross,
        })
    }

    /// Wraps an explicit tile assignment, given in canonical box order.
    pub fn with_tiles(shape: &Shape, cross: Vec<bool>) -> Result<PipeDream> {
        if cross.len() as u64 != shape.box_count() {
            return Err(Error::InvalidArgument(format!(
                "{} tiles for a shape of {} boxes",
                cross.len(),
                shape.box_count()
            )));
        }
        Ok(PipeDream {
            shape: shape.clone(),
            cross,
        })
    }

    pub fn all_cross(shape: &Shape) -> PipeDream {
        PipeDream {
            shape: shape.clone(),
            cross: vec![true; shape.box_count() as usize],
        }
    }

    pub fn all_bump(shape: &Shape) -> PipeDream {
        PipeDream {
            shape: shape.clone(),
            cross: vec![false; shape.box_count() as usize],
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Tile flags in canonical box order.
    pub fn tiles(&self) -> &[bool] {
        &self.cross
    }

    pub fn cross_count(&self) -> u64 {
        self.cross.iter().filter(|&&c| c).count() as u64
    }

    /// The represented permutation, computed algebraically: walk the boxes in
    /// canonical order and let every cross tile on diagonal i swap the frontier
    /// entries at positions i and i+1.
    pub fn permutation_product(&self) -> Perm {
        let n = self.shape.n();
        let mut one_line: Vec<u32> = (1..=n as u32).collect();
        for (b, &cross) in self.shape.boxes().zip(&self.cross) {
            if cross {
                let i = b.diagonal() as usize;
                one_line.swap(i - 1, i);
            }
        }
        Perm { one_line }
    }

    /// Inversions of the represented permutation, by the algebraic route.
    pub fn inversion_count(&self) -> u64 {
        self.permutation_product().inversions()
    }

    /// Traces every pipe through the tiles; see [`Routing`]. Requires an
    /// order-convex shape.
    pub fn trace(&self) -> Result<Routing> {
        trace(self)
    }

    pub fn from_json(text: &str) -> Result<PipeDream> {
        let file: PipeDreamFile = serde_json::from_str(text)
            .map_err(|e| Error::Malformed(format!("pipe dream file: {e}")))?;
        let shape = Shape::from_boxes(file.shape.n, &file.shape.boxes)?;
        let cross = file.cross.iter().map(|&c| c != 0).collect();
        PipeDream::with_tiles(&shape, cross)
    }

    /// Serializes as {"shape", "cross"}; both box list and tile flags are in
    /// canonical order, whatever order the boxes were first given in.
    pub fn to_json(&self) -> String {
        let file = PipeDreamFile {
            shape: ShapeField {
                n: self.shape.n(),
                boxes: self.shape.boxes().map(|b| (b.x, b.y)).collect(),
            },
            cross: self.cross.iter().map(|&c| c as u8).collect(),
        };
        serde_json::to_string(&file).expect("pipe dream serialization cannot fail")
    }
}

/// The full geometric routing of a pipe dream's n pipes.
///
/// Pipes are labeled 1..=n by their entry position along the southwest
/// boundary, northwest to southeast. Boundary positions form n slots; a slot
/// crossed by no pipe path holds a pipe of length 0, which keeps both the
/// entry and exit lists at length n (such slots hold `None`).
#[derive(Debug, Clone)]
pub struct Routing {
    pub n: usize,
    /// Entry edge of pipe q at index q-1; `None` for length-0 pipes.
    pub entries: Vec<Option<EdgeRef>>,
    /// Exit edge at the k-th exit position (northwest to southeast) at index
    /// k-1; `None` where a length-0 pipe exits.
    pub exits: Vec<Option<EdgeRef>>,
    /// Box visits of pipe q at index q-1, in traversal order.
    pub paths: Vec<Vec<Visit>>,
    /// R_q = visits - 1; a length-0 pipe has R_q = -1.
    pub lengths: Vec<i64>,
    /// Shared boxes per pipe pair (q, q') with q < q'; pairs that never meet
    /// are absent.
    pub kisses: BTreeMap<(u32, u32), u64>,
    /// Shared cross-tile boxes per pipe pair; subset of the kiss pairs.
    pub crossings: BTreeMap<(u32, u32), u64>,
    /// v(k) = label of the pipe leaving at the k-th exit position.
    pub permutation: Perm,
}

impl Routing {
    /// Number of pipe pairs crossing an odd number of times; equals the
    /// inversion count of the permutation.
    pub fn odd_crossing_pairs(&self) -> u64 {
        self.crossings.values().filter(|&&c| c % 2 == 1).count() as u64
    }
}

/// Boundary slots: the southwest entry edges, read northwest to southeast,
/// sit at odd keys 1, 3, .., 2n-1 with the west edge of diagonal d at 2d-1
/// and the south edge at 2d+1. Exit edges mirror this (north at 2d-1, east at
/// 2d+1). Slot 2k-1 is position k, for both entries and exits.
fn west_slot(d: i64) -> i64 {
    2 * d - 1
}

fn south_north_share(d: i64) -> (i64, i64) {
    (2 * d + 1, 2 * d - 1)
}

fn trace(pd: &PipeDream) -> Result<Routing> {
    let shape = &pd.shape;
    let n = shape.n();
    if let Some(v) = shape.convexity_violation() {
        return Err(Error::NotOrderConvex { x: v.x, y: v.y });
    }
    let cross_of: HashMap<BoxCoord, bool> =
        shape.boxes().zip(pd.cross.iter().copied()).collect();
    let max_d = n as i64 - 1;

    // Entry edges. A west edge takes a pipe unless the west neighbour supplies
    // one, or, on diagonal 1, the boundary elbow from the box one step down
    // the diagonal does. South edges mirror this on diagonal n-1.
    let mut entries_by_slot: BTreeMap<i64, EdgeRef> = BTreeMap::new();
    for b in shape.boxes() {
        let d = b.diagonal();
        let elbow_fed = shape.contains(BoxCoord::new(b.x - 1, b.y - 1));
        if !shape.contains(BoxCoord::new(b.x - 1, b.y)) && !(d == 1 && elbow_fed) {
            let prev = entries_by_slot.insert(west_slot(d), EdgeRef { at: b, side: Side::West });
            assert!(prev.is_none(), "two entries claim one boundary slot");
        }
        let (south_slot, _) = south_north_share(d);
        if !shape.contains(BoxCoord::new(b.x, b.y - 1)) && !(d == max_d && elbow_fed) {
            let prev = entries_by_slot.insert(south_slot, EdgeRef { at: b, side: Side::South });
            assert!(prev.is_none(), "two entries claim one boundary slot");
        }
    }

    let mut entries: Vec<Option<EdgeRef>> = vec![None; n];
    let mut paths: Vec<Vec<Visit>> = vec![Vec::new(); n];
    let mut exit_edges: Vec<Option<(i64, EdgeRef)>> = vec![None; n];
    let mut visits_by_box: HashMap<BoxCoord, Vec<u32>> = HashMap::new();

    for (&slot, &edge) in &entries_by_slot {
        let label = ((slot + 1) / 2) as usize;
        entries[label - 1] = Some(edge);

        // Follow the pipe. Levels strictly increase along the path, so this
        // terminates; the guard only catches a broken stepping rule.
        let mut at = edge.at;
        let mut enters = edge.side;
        let path = &mut paths[label - 1];
        loop {
            assert!(
                path.len() as u64 <= 2 * shape.box_count(),
                "pipe path exceeds twice the box count"
            );
            let cross = cross_of[&at];
            let leaves = match (enters, cross) {
                (Side::West, true) | (Side::South, false) => Side::East,
                (Side::South, true) | (Side::West, false) => Side::North,
                _ => unreachable!("pipes enter from the west or south"),
            };
            path.push(Visit { at, enters, leaves });
            visits_by_box.entry(at).or_default().push(label as u32);
            let d = at.diagonal();
            let target = match leaves {
                Side::East => BoxCoord::new(at.x + 1, at.y),
                Side::North => BoxCoord::new(at.x, at.y + 1),
                _ => unreachable!(),
            };
            if shape.contains(target) {
                at = target;
                enters = match leaves {
                    Side::East => Side::West,
                    Side::North => Side::South,
                    _ => unreachable!(),
                };
                continue;
            }
            // Boundary elbows re-enter the next box up the extreme diagonals.
            let diag_next = BoxCoord::new(at.x + 1, at.y + 1);
            if leaves == Side::North && d == 1 && shape.contains(diag_next) {
                at = diag_next;
                enters = Side::West;
                continue;
            }
            if leaves == Side::East && d == max_d && shape.contains(diag_next) {
                at = diag_next;
                enters = Side::South;
                continue;
            }
            let (east_slot, north_slot) = south_north_share(d);
            let slot = if leaves == Side::North { north_slot } else { east_slot };
            let k = ((slot + 1) / 2) as usize;
            assert!(
                exit_edges[k - 1].is_none(),
                "two pipes leave through one boundary slot"
            );
            exit_edges[k - 1] = Some((label as i64, EdgeRef { at, side: leaves }));
            break;
        }
    }

    // Every occupied entry slot must be matched by an occupied exit slot, and
    // the empty slots are exactly the length-0 pipes.
    let mut one_line = vec![0u32; n];
    let mut exits: Vec<Option<EdgeRef>> = vec![None; n];
    for k in 1..=n {
        match exit_edges[k - 1] {
            Some((label, edge)) => {
                assert!(
                    entries[label as usize - 1].is_some(),
                    "exit slot filled by an unlabeled pipe"
                );
                one_line[k - 1] = label as u32;
                exits[k - 1] = Some(edge);
            }
            None => {
                assert!(
                    entries[k - 1].is_none(),
                    "entered pipe never reached an exit slot"
                );
                one_line[k - 1] = k as u32;
            }
        }
    }

    // Two passages per box: one lane from the west edge, one from the south.
    assert_eq!(visits_by_box.len() as u64, shape.box_count());
    let mut kisses: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    let mut crossings: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for (b, labels) in &visits_by_box {
        assert_eq!(labels.len(), 2, "box {b} not visited exactly twice");
        let pair = (labels[0].min(labels[1]), labels[0].max(labels[1]));
        assert_ne!(pair.0, pair.1, "a pipe met itself in box {b}");
        *kisses.entry(pair).or_insert(0) += 1;
        if cross_of[b] {
            *crossings.entry(pair).or_insert(0) += 1;
        }
    }

    let lengths = paths
        .iter()
        .map(|path| path.len() as i64 - 1)
        .collect();

    Ok(Routing {
        n,
        entries,
        exits,
        paths,
        lengths,
        kisses,
        crossings,
        permutation: Perm { one_line },
    })
}

/// Rendering knobs for [`render_svg`].
#[derive(Debug, Clone)]
pub struct RenderOptions {
    /// Box side length in pixels.
    pub unit: f64,
    /// Draw pipe labels at entries and exits.
    pub labels: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { unit: 40.0, labels: true }
    }
}

const PALETTE: [&str; 12] = [
    "#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377",
    "#e07b39", "#225555", "#882255", "#44aa99", "#999933", "#332288",
];

/// Renders the pipe dream and its routing as a standalone SVG document: the
/// box grid, one colored path per pipe (quarter-circle arcs for bumps and
/// boundary elbows, straight strokes for crosses), and optional labels.
/// Byte-identical output for identical inputs.
pub fn render_svg(pd: &PipeDream, routing: &Routing, options: &RenderOptions) -> String {
    let u = options.unit;
    let shape = pd.shape();
    let (xlo, xhi, ylo, yhi) = shape
        .boxes()
        .fold(None, |acc: Option<(i64, i64, i64, i64)>, b| {
            Some(match acc {
                None => (b.x, b.x, b.y, b.y),
                Some((a, c, d, e)) => (a.min(b.x), c.max(b.x), d.min(b.y), e.max(b.y)),
            })
        })
        .unwrap_or((0, 0, 0, 0));
    // Screen placement: x east, y north; one unit of margin all round.
    let sx = |bx: i64| (bx - xlo) as f64 * u + u;
    let sy = |by: i64| (yhi - by) as f64 * u + u;
    let width = (xhi - xlo + 1) as f64 * u + 2.0 * u;
    let height = (yhi - ylo + 1) as f64 * u + 2.0 * u;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str("<g fill=\"#fcfcfc\" stroke=\"#b8b8b8\" stroke-width=\"1\">\n");
    for b in shape.boxes() {
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{u}\" height=\"{u}\"/>\n",
            sx(b.x),
            sy(b.y)
        ));
    }
    svg.push_str("</g>\n");

    let stroke_width = u * 0.18;
    for (q, path) in routing.paths.iter().enumerate() {
        if path.is_empty() {
            continue;
        }
        let color = PALETTE[q % PALETTE.len()];
        let mut d = String::new();
        let r = u / 2.0;
        for (i, visit) in path.iter().enumerate() {
            let (x0, y0) = (sx(visit.at.x), sy(visit.at.y));
            let west = (x0, y0 + r);
            let south = (x0 + r, y0 + u);
            let north = (x0 + r, y0);
            let east = (x0 + u, y0 + r);
            let start = match visit.enters {
                Side::West => west,
                Side::South => south,
                _ => unreachable!(),
            };
            if i == 0 {
                d.push_str(&format!("M {} {} ", start.0, start.1));
            } else {
                // A level jump of 2 between consecutive boxes marks a boundary
                // elbow; its quarter arc is centered on the shared corner.
                let prev = path[i - 1].at;
                if visit.at.level() - prev.level() == 2 {
                    let sweep = if visit.enters == Side::West { 1 } else { 0 };
                    d.push_str(&format!("A {r} {r} 0 0 {sweep} {} {} ", start.0, start.1));
                }
            }
            let end = match visit.leaves {
                Side::North => north,
                Side::East => east,
                _ => unreachable!(),
            };
            match (visit.enters, visit.leaves) {
                (Side::West, Side::East) | (Side::South, Side::North) => {
                    d.push_str(&format!("L {} {} ", end.0, end.1));
                }
                (Side::West, Side::North) => {
                    d.push_str(&format!("A {r} {r} 0 0 0 {} {} ", end.0, end.1));
                }
                (Side::South, Side::East) => {
                    d.push_str(&format!("A {r} {r} 0 0 1 {} {} ", end.0, end.1));
                }
                _ => unreachable!(),
            }
        }
        svg.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{stroke_width}\" \
             stroke-linecap=\"round\"/>\n",
            d.trim_end()
        ));
    }

    if options.labels {
        let font = u * 0.35;
        svg.push_str(&format!(
            "<g font-family=\"monospace\" font-size=\"{font}\" fill=\"#333\">\n"
        ));
        for (q, entry) in routing.entries.iter().enumerate() {
            if let Some(e) = entry {
                let (x0, y0) = (sx(e.at.x), sy(e.at.y));
                let (tx, ty) = match e.side {
                    Side::West => (x0 - 0.75 * u, y0 + 0.6 * u),
                    Side::South => (x0 + 0.35 * u, y0 + 1.7 * u),
                    _ => unreachable!(),
                };
                svg.push_str(&format!("<text x=\"{tx}\" y=\"{ty}\">{}</text>\n", q + 1));
            }
        }
        for (k, exit) in routing.exits.iter().enumerate() {
            if let Some(e) = exit {
                let label = routing.permutation.one_line[k];
                let (x0, y0) = (sx(e.at.x), sy(e.at.y));
                let (tx, ty) = match e.side {
                    Side::North => (x0 + 0.35 * u, y0 - 0.35 * u),
                    Side::East => (x0 + 1.25 * u, y0 + 0.6 * u),
                    _ => unreachable!(),
                };
                svg.push_str(&format!("<text x=\"{tx}\" y=\"{ty}\">{label}</text>\n"));
            }
        }
        svg.push_str("</g>\n");
    }

    svg.push_str("</svg>\n");
    svg
}
