//! Reconstruction of a jigsaw from its deck.
//!
//! 1. Search the windows around every multiplicity-1 tile and record the
//!    unique neighbour tuples as labelled arcs of a graph `H`.
//! 2. Lay out the largest component of `H` in relative coordinates.
//! 3. Fill holes whose four neighbours force a unique remaining tile.
//! 4. Keep the largest fully assembled square `S_H`.
//! 5. Grow it row by row upwards, downwards, left and right.
//! 6. Accept only if the result is `n×n` and its deck equals the input.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::grid::{Direction, Edge, Vertex, VertexSet};
use crate::jigsaw::{Deck, Jigsaw, Tile};
use crate::union_find::UnionFind;
use crate::window::{enumerate_windows_indexed, TileIndex, WindowStatus};

/// Node budget per window search unless overridden.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FailureReason {
    NoBulk,
    InconsistentComponent,
    AmbiguousWindowTile,
    ExtensionAmbiguous,
    ExtensionIncomplete,
    DeckMismatch,
    BudgetExceeded,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Exact(Jigsaw),
    Failure(FailureReason),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WindowStats {
    pub unique: usize,
    pub ambiguous: usize,
    pub no_window: usize,
    pub budget_exceeded: usize,
    pub nodes_expanded_total: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Telemetry {
    pub windows: WindowStats,
    /// Number of connected components of `H`.
    pub components: usize,
    pub largest_component: usize,
    /// Side of the assembled square `S_H`.
    pub bulk_side: usize,
    /// Rows added upwards, downwards, left and right.
    pub extension_steps: [usize; 4],
    pub ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReconstructionReport {
    pub outcome: Outcome,
    pub telemetry: Telemetry,
}

#[derive(Serialize)]
struct Record<'a> {
    outcome: &'a str,
    reason: Option<FailureReason>,
    s: usize,
    components: usize,
    nodes_expanded_total: u64,
    ms: u64,
}

impl ReconstructionReport {
    pub fn jigsaw(&self) -> Option<&Jigsaw> {
        match &self.outcome {
            Outcome::Exact(j) => Some(j),
            Outcome::Failure(_) => None,
        }
    }

    pub fn reason(&self) -> Option<FailureReason> {
        match self.outcome {
            Outcome::Exact(_) => None,
            Outcome::Failure(r) => Some(r),
        }
    }

    /// One-line JSON summary with fields `outcome`, `reason`, `s`,
    /// `components`, `nodes_expanded_total` and `ms`.
    pub fn to_json(&self) -> String {
        let t = &self.telemetry;
        serde_json::to_string(&Record {
            outcome: if self.jigsaw().is_some() { "exact" } else { "failure" },
            reason: self.reason(),
            s: t.bulk_side,
            components: t.components,
            nodes_expanded_total: t.windows.nodes_expanded_total,
            ms: t.ms,
        })
        .expect("record serialises")
    }
}

/// Labelled directed graph on the multiplicity-1 tiles of a deck. Deck
/// identities index `tiles`, the deck in sorted order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyGraph {
    pub tiles: Vec<Tile>,
    /// Identities of the multiplicity-1 tiles.
    pub nodes: Vec<usize>,
    /// `(t, d) -> t'` when `t'` was found at direction `d` from `t`.
    pub arcs: BTreeMap<(usize, Direction), usize>,
    pub stats: WindowStats,
}

impl AdjacencyGraph {
    /// Connected components, ignoring arc directions, each sorted and
    /// ordered by smallest identity. Isolated nodes are singletons.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let slot: BTreeMap<usize, usize> = self.nodes.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut uf = UnionFind::new(self.nodes.len());
        for (&(u, _), &v) in &self.arcs {
            uf.union(slot[&u], slot[&v]);
        }
        uf.groups()
            .into_iter()
            .map(|g| g.into_iter().map(|i| self.nodes[i]).collect())
            .collect()
    }
}

pub fn build_adjacency_graph(deck: &Deck, k: u32, budget: u64) -> AdjacencyGraph {
    let index = TileIndex::new(deck);
    let tiles = deck.sorted_tiles();
    let mut identity: BTreeMap<Tile, usize> = BTreeMap::new();
    for (i, t) in tiles.iter().enumerate().rev() {
        identity.insert(*t, i);
    }
    let nodes: Vec<usize> = identity
        .iter()
        .filter(|(t, _)| deck.multiplicity(t) == 1)
        .map(|(_, &i)| i)
        .collect();

    let outcomes: Vec<_> = nodes
        .par_iter()
        .map(|&id| enumerate_windows_indexed(&index, &tiles[id], k, budget).expect("node tiles are in the deck"))
        .collect();

    let mut stats = WindowStats::default();
    let mut arcs = BTreeMap::new();
    for (&id, out) in nodes.iter().zip(&outcomes) {
        stats.nodes_expanded_total += out.nodes_expanded;
        match out.status {
            WindowStatus::UniqueTuple => stats.unique += 1,
            WindowStatus::Ambiguous => stats.ambiguous += 1,
            WindowStatus::NoWindow => stats.no_window += 1,
            WindowStatus::BudgetExceeded => stats.budget_exceeded += 1,
        }
        if let Some(tuple) = out.tuple {
            for (d, t) in Direction::ALL.into_iter().zip(tuple) {
                if deck.multiplicity(&t) == 1 {
                    arcs.insert((id, d), identity[&t]);
                }
            }
        }
    }
    AdjacencyGraph {
        tiles,
        nodes,
        arcs,
        stats,
    }
}

/// Unused deck identities grouped by tile.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pool {
    free: BTreeMap<Tile, Vec<usize>>,
}

impl Pool {
    pub fn new(items: impl IntoIterator<Item = (usize, Tile)>) -> Self {
        let mut pool = Pool::default();
        for (id, t) in items {
            pool.put(id, t);
        }
        pool
    }

    pub fn count(&self, t: &Tile) -> usize {
        self.free.get(t).map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.free.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    pub fn kinds(&self) -> impl Iterator<Item = &Tile> {
        self.free.keys()
    }

    pub fn take(&mut self, t: &Tile) -> Option<usize> {
        let ids = self.free.get_mut(t)?;
        let id = ids.pop();
        if ids.is_empty() {
            self.free.remove(t);
        }
        id
    }

    pub fn put(&mut self, id: usize, t: Tile) {
        self.free.entry(t).or_default().push(id);
    }
}

/// Deck tiles placed at relative positions, plus the unused ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialAssembly {
    pub cells: BTreeMap<Vertex, (usize, Tile)>,
    pub remaining: Pool,
}

impl PartialAssembly {
    pub fn tile(&self, v: Vertex) -> Option<Tile> {
        self.cells.get(&v).map(|&(_, t)| t)
    }

    pub fn occupied(&self) -> VertexSet {
        self.cells.keys().copied().collect()
    }

    /// Whether every pair of adjacent placed tiles agrees on its shared edge.
    pub fn is_feasible(&self) -> bool {
        self.cells.iter().all(|(&v, &(_, t))| {
            [Direction::Up, Direction::Right]
                .into_iter()
                .all(|d| self.tile(v.step(d)).is_none_or(|u| t.fits(d, &u)))
        })
    }

    fn place(&mut self, v: Vertex, t: Tile) -> bool {
        match self.remaining.take(&t) {
            Some(id) => {
                self.cells.insert(v, (id, t));
                true
            }
            None => false,
        }
    }
}

/// Lays out `component` by following arc labels from its smallest identity,
/// which goes to the origin. The remaining deck identities form the pool.
pub fn assemble_component(h: &AdjacencyGraph, component: &[usize]) -> Result<PartialAssembly, FailureReason> {
    let members: BTreeSet<usize> = component.iter().copied().collect();
    let mut incident: BTreeMap<usize, Vec<(usize, Vertex)>> = BTreeMap::new();
    for (&(u, d), &v) in &h.arcs {
        if members.contains(&u) && members.contains(&v) {
            incident.entry(u).or_default().push((v, d.delta()));
            incident.entry(v).or_default().push((u, -d.delta()));
        }
    }
    let Some(&root) = members.first() else {
        return Err(FailureReason::NoBulk);
    };
    let mut pos: BTreeMap<usize, Vertex> = BTreeMap::from([(root, Vertex::ORIGIN)]);
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let p = pos[&u];
        for &(v, delta) in incident.get(&u).into_iter().flatten() {
            match pos.get(&v) {
                Some(&q) if q != p + delta => return Err(FailureReason::InconsistentComponent),
                Some(_) => {}
                None => {
                    pos.insert(v, p + delta);
                    queue.push_back(v);
                }
            }
        }
    }
    let mut assembly = PartialAssembly {
        cells: BTreeMap::new(),
        remaining: Pool::new(
            h.tiles
                .iter()
                .enumerate()
                .filter(|(i, _)| !pos.contains_key(i))
                .map(|(i, &t)| (i, t)),
        ),
    };
    for (&id, &p) in &pos {
        if assembly.cells.insert(p, (id, h.tiles[id])).is_some() {
            return Err(FailureReason::InconsistentComponent);
        }
    }
    if !assembly.is_feasible() {
        return Err(FailureReason::InconsistentComponent);
    }
    Ok(assembly)
}

/// Repeatedly fills empty positions whose four neighbours are placed and
/// which exactly one remaining deck tile fits.
pub fn fill_holes(mut assembly: PartialAssembly) -> PartialAssembly {
    loop {
        let holes: BTreeSet<Vertex> = assembly
            .cells
            .keys()
            .flat_map(|v| v.neighbours())
            .filter(|v| !assembly.cells.contains_key(v))
            .filter(|v| v.neighbours().iter().all(|u| assembly.cells.contains_key(u)))
            .collect();
        let mut filled = false;
        for v in holes {
            let need = Direction::ALL.map(|d| assembly.tile(v.step(d)).unwrap().side(d.opposite()));
            let wanted = Tile(need);
            // Four sides pin the tile down completely.
            if assembly.remaining.count(&wanted) == 1 {
                assembly.place(v, wanted);
                filled = true;
            }
        }
        if !filled {
            return assembly;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Square {
    pub corner: Vertex,
    pub side: usize,
}

/// Largest fully occupied axis-aligned square, by dynamic programming over
/// the bounding box. Ties go to the smallest lower-left corner by `x`, then `y`.
pub fn largest_square(occupied: &VertexSet) -> Option<Square> {
    let (min_x, max_x) = (occupied.iter().map(|v| v.x).min()?, occupied.iter().map(|v| v.x).max()?);
    let (min_y, max_y) = (occupied.iter().map(|v| v.y).min()?, occupied.iter().map(|v| v.y).max()?);
    let w = (max_x - min_x + 1) as usize;
    let h = (max_y - min_y + 1) as usize;
    // side[i][j]: largest square with lower-left corner (min_x + i, min_y + j).
    let mut side = vec![vec![0usize; h + 1]; w + 1];
    let mut best: Option<Square> = None;
    for i in (0..w).rev() {
        for j in (0..h).rev() {
            let v = Vertex::new(min_x + i as i32, min_y + j as i32);
            if occupied.contains(&v) {
                side[i][j] = 1 + side[i + 1][j].min(side[i][j + 1]).min(side[i + 1][j + 1]);
            }
        }
    }
    for (i, col) in side.iter().enumerate().take(w) {
        for (j, &s) in col.iter().enumerate().take(h) {
            if s > best.map_or(0, |b| b.side) {
                best = Some(Square {
                    corner: Vertex::new(min_x + i as i32, min_y + j as i32),
                    side: s,
                });
            }
        }
    }
    best
}

/// Restricts the assembly to its largest square, returning the other
/// placed tiles to the pool.
pub fn restrict_to_square(mut assembly: PartialAssembly, sq: Square) -> PartialAssembly {
    let s = sq.side as i32;
    let inside = |v: &Vertex| (0..s).contains(&(v.x - sq.corner.x)) && (0..s).contains(&(v.y - sq.corner.y));
    let outside: Vec<Vertex> = assembly.cells.keys().filter(|v| !inside(v)).copied().collect();
    for v in outside {
        let (id, t) = assembly.cells.remove(&v).unwrap();
        assembly.remaining.put(id, t);
    }
    assembly
}

/// Bounds of a rectangular assembly, inclusive.
#[derive(Clone, Copy, Debug)]
struct Rect {
    lo: Vertex,
    hi: Vertex,
}

impl Rect {
    fn of(cells: &BTreeMap<Vertex, (usize, Tile)>) -> Option<Rect> {
        let lo = Vertex::new(cells.keys().map(|v| v.x).min()?, cells.keys().map(|v| v.y).min()?);
        let hi = Vertex::new(cells.keys().map(|v| v.x).max()?, cells.keys().map(|v| v.y).max()?);
        Some(Rect { lo, hi })
    }

    fn width(&self) -> u32 {
        (self.hi.x - self.lo.x + 1) as u32
    }

    fn height(&self) -> u32 {
        (self.hi.y - self.lo.y + 1) as u32
    }

    /// The outermost row or column in direction `d`, ordered along
    /// `along(d)`.
    fn frontier(&self, d: Direction) -> Vec<Vertex> {
        match d {
            Direction::Up => (self.lo.x..=self.hi.x).map(|x| Vertex::new(x, self.hi.y)).collect(),
            Direction::Down => (self.lo.x..=self.hi.x).map(|x| Vertex::new(x, self.lo.y)).collect(),
            Direction::Left => (self.lo.y..=self.hi.y).map(|y| Vertex::new(self.lo.x, y)).collect(),
            Direction::Right => (self.lo.y..=self.hi.y).map(|y| Vertex::new(self.hi.x, y)).collect(),
        }
    }
}

/// The direction in which a row added in direction `d` is traversed.
fn along(d: Direction) -> Direction {
    match d {
        Direction::Up | Direction::Down => Direction::Right,
        Direction::Left | Direction::Right => Direction::Up,
    }
}

enum Step {
    Grew,
    Stop,
}

/// Tiles `t'` that can sit at `p + d` above `t = tile(p)` with some
/// remaining pair `t'_l`, `t'_r` beside them, also fitting the tiles
/// beside `t`.
fn forced_options(m: &PartialAssembly, p: Vertex, d: Direction) -> BTreeSet<Tile> {
    let a = along(d);
    let below = m.tile(p).unwrap();
    let below_l = m.tile(p.step(a.opposite())).unwrap();
    let below_r = m.tile(p.step(a)).unwrap();
    let pool = &m.remaining;
    let mut options = BTreeSet::new();
    for &t in pool.kinds() {
        if !below.fits(d, &t) {
            continue;
        }
        let avail = |u: &Tile, used: &[&Tile]| pool.count(u) > used.iter().filter(|&&x| x == u).count();
        let lefts: Vec<&Tile> = pool
            .kinds()
            .filter(|l| below_l.fits(d, l) && t.fits(a.opposite(), l) && avail(l, &[&t]))
            .collect();
        let ok = lefts.iter().any(|l| {
            pool.kinds()
                .any(|r| below_r.fits(d, r) && t.fits(a, r) && avail(r, &[&t, l]))
        });
        if ok {
            options.insert(t);
        }
    }
    options
}

/// Attempts to add one row in direction `d`.
fn grow(m: &mut PartialAssembly, rect: Rect, d: Direction) -> Result<Step, FailureReason> {
    let a = along(d);
    let front = rect.frontier(d);
    let w = front.len();
    let inner = if w >= 3 { &front[1..w - 1] } else { &front[..0] };

    let mut choices = Vec::with_capacity(inner.len());
    for &p in inner {
        let options = forced_options(m, p, d);
        if options.is_empty() {
            return Ok(Step::Stop);
        }
        choices.push(options);
    }
    if choices.iter().any(|o| o.len() >= 2) {
        return Err(FailureReason::ExtensionAmbiguous);
    }
    for (&p, options) in inner.iter().zip(&choices) {
        let t = *options.first().unwrap();
        if !m.place(p.step(d), t) {
            // Each position forces one tile but the deck holds too few copies.
            return Err(FailureReason::ExtensionAmbiguous);
        }
    }

    let (cl, cr) = (front[0], front[w - 1]);
    let (pl, pr) = (cl.step(d), cr.step(d));
    let fits_corner = |c: Vertex, p: Vertex, t: &Tile| {
        m.tile(c).unwrap().fits(d, t)
            && Direction::ALL
                .into_iter()
                .filter(|&e| e != d.opposite())
                .all(|e| m.tile(p.step(e)).is_none_or(|u| t.fits(e, &u)))
    };
    let left: Vec<Tile> = m.remaining.kinds().filter(|t| fits_corner(cl, pl, t)).copied().collect();
    let pairs: Vec<(Tile, Option<Tile>)> = if w == 1 {
        left.into_iter().map(|t| (t, None)).collect()
    } else {
        let right: Vec<Tile> = m.remaining.kinds().filter(|t| fits_corner(cr, pr, t)).copied().collect();
        let mut pairs = Vec::new();
        for &l in &left {
            for &r in &right {
                let enough = l != r || m.remaining.count(&l) >= 2;
                let joined = w > 2 || l.fits(a, &r);
                if enough && joined {
                    pairs.push((l, Some(r)));
                }
            }
        }
        pairs
    };
    match pairs.as_slice() {
        [(l, r)] => {
            m.place(pl, *l);
            if let Some(r) = r {
                m.place(pr, *r);
            }
            Ok(Step::Grew)
        }
        [] if inner.is_empty() => Ok(Step::Stop),
        _ => Err(FailureReason::ExtensionAmbiguous),
    }
}

/// Grows a square bulk to an `n×n` assembly, upwards, downwards, left and
/// right in turn. Returns the rows added per direction.
pub fn extend(bulk: &mut PartialAssembly, n: u32) -> Result<[usize; 4], FailureReason> {
    let mut steps = [0; 4];
    let order = [Direction::Up, Direction::Down, Direction::Left, Direction::Right];
    for (slot, d) in order.into_iter().enumerate() {
        loop {
            let rect = Rect::of(&bulk.cells).ok_or(FailureReason::NoBulk)?;
            let extent = match d.axis() {
                crate::grid::Axis::Vertical => rect.height(),
                crate::grid::Axis::Horizontal => rect.width(),
            };
            if extent >= n {
                break;
            }
            match grow(bulk, rect, d)? {
                Step::Grew => steps[slot] += 1,
                Step::Stop => break,
            }
        }
    }
    let rect = Rect::of(&bulk.cells).ok_or(FailureReason::NoBulk)?;
    let full = rect.width() == n && rect.height() == n && bulk.cells.len() == (n * n) as usize;
    if !full || !bulk.remaining.is_empty() || !bulk.is_feasible() {
        return Err(FailureReason::ExtensionIncomplete);
    }
    Ok(steps)
}

/// Reads the jigsaw off an `n×n` feasible assembly.
fn emit(assembly: &PartialAssembly, deck: &Deck) -> Jigsaw {
    let rect = Rect::of(&assembly.cells).expect("assembly is non-empty");
    let shift = Vertex::new(1, 1) - rect.lo;
    let mut j = Jigsaw::constant(deck.params(), 0).expect("colour 0 is valid");
    for (&v, &(_, t)) in &assembly.cells {
        let u = v + shift;
        for d in Direction::ALL {
            j.set_colour(Edge::from_dir(u, d), t.side(d))
                .expect("deck colours are in range");
        }
    }
    j
}

pub fn reconstruct(deck: &Deck, k: u32, budget: u64) -> ReconstructionReport {
    let start = Instant::now();
    let mut telemetry = Telemetry::default();
    let outcome = run(deck, k, budget, &mut telemetry);
    telemetry.ms = start.elapsed().as_millis() as u64;
    ReconstructionReport { outcome, telemetry }
}

fn run(deck: &Deck, k: u32, budget: u64, telemetry: &mut Telemetry) -> Outcome {
    let fail = Outcome::Failure;
    let h = build_adjacency_graph(deck, k, budget);
    telemetry.windows = h.stats;
    let components = h.components();
    telemetry.components = components.len();
    // Components come ordered by smallest identity, so the first maximum wins ties.
    let Some(largest) = components.iter().rev().max_by_key(|c| c.len()) else {
        return fail(if h.stats.budget_exceeded > 0 {
            FailureReason::BudgetExceeded
        } else {
            FailureReason::NoBulk
        });
    };
    telemetry.largest_component = largest.len();
    let assembly = match assemble_component(&h, largest) {
        Ok(a) => fill_holes(a),
        Err(r) => return fail(r),
    };
    let Some(sq) = largest_square(&assembly.occupied()) else {
        return fail(FailureReason::NoBulk);
    };
    telemetry.bulk_side = sq.side;
    let mut bulk = restrict_to_square(assembly, sq);
    match extend(&mut bulk, deck.params().n()) {
        Ok(steps) => telemetry.extension_steps = steps,
        Err(r) => return fail(r),
    }
    let j = emit(&bulk, deck);
    if !verify(&j, deck) {
        return fail(FailureReason::DeckMismatch);
    }
    Outcome::Exact(j)
}

/// Whether `candidate` has exactly this deck.
pub fn verify(candidate: &Jigsaw, deck: &Deck) -> bool {
    candidate.deck() == *deck
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jigsaw::JigsawParams;
    use crate::window::{default_k, true_tuple};

    fn distinct(n: u32) -> Jigsaw {
        let params = JigsawParams::new(n, 1_000_000).unwrap();
        (0..)
            .map(|s| Jigsaw::generate(params, s))
            .find(|j| j.all_colours_distinct())
            .unwrap()
    }

    /// The assembly of `j` restricted to `cells`, everything else pooled.
    fn assembly_of(j: &Jigsaw, cells: impl Fn(Vertex) -> bool) -> PartialAssembly {
        let mut a = PartialAssembly::default();
        for (i, (v, t)) in j.tiles().enumerate() {
            if cells(v) {
                a.cells.insert(v, (i, t));
            } else {
                a.remaining.put(i, t);
            }
        }
        a
    }

    #[test]
    fn distinct_colours_give_a_grid_graph() {
        let j = distinct(10);
        let h = build_adjacency_graph(&j.deck(), 3, DEFAULT_BUDGET);
        let comps = h.components();
        let sizes: Vec<usize> = comps.iter().map(Vec::len).collect();
        // Centres in [4, 7]² admit a radius-3 window; their arcs also reach
        // the sixteen side neighbours of that block.
        assert_eq!(sizes.iter().max(), Some(&32));
        assert_eq!(h.stats.unique, 16);
        for (&(u, d), &v) in &h.arcs {
            let v_is_centre = Direction::ALL.iter().any(|&e| h.arcs.contains_key(&(v, e)));
            if v_is_centre {
                assert_eq!(h.arcs.get(&(v, d.opposite())), Some(&u));
            }
            assert!(h.tiles[u].fits(d, &h.tiles[v]));
        }
    }

    #[test]
    fn constant_deck_has_no_bulk() {
        let j = Jigsaw::constant(JigsawParams::new(2, 2).unwrap(), 0).unwrap();
        let h = build_adjacency_graph(&j.deck(), 1, DEFAULT_BUDGET);
        assert!(h.nodes.is_empty() && h.arcs.is_empty());
        let report = reconstruct(&j.deck(), 1, DEFAULT_BUDGET);
        assert_eq!(report.reason(), Some(FailureReason::NoBulk));
    }

    #[test]
    fn distinct_colours_reconstruct_exactly() {
        for n in [5, 10] {
            let j = distinct(n);
            let report = reconstruct(&j.deck(), default_k(n), DEFAULT_BUDGET);
            assert_eq!(report.jigsaw(), Some(&j), "{}", report.to_json());
        }
    }

    #[test]
    fn unique_tuples_match_ground_truth() {
        let params = JigsawParams::new(12, 40).unwrap();
        for seed in 0..5 {
            let j = Jigsaw::generate(params, seed);
            let deck = j.deck();
            let index = TileIndex::new(&deck);
            for x in 2..=11 {
                for y in 2..=11 {
                    let v = Vertex::new(x, y);
                    let t = j.tile_at(v).unwrap();
                    if deck.multiplicity(&t) != 1 {
                        continue;
                    }
                    let out = enumerate_windows_indexed(&index, &t, 2, DEFAULT_BUDGET).unwrap();
                    if out.status == WindowStatus::UniqueTuple && (3..=10).contains(&x) && (3..=10).contains(&y) {
                        assert_eq!(out.tuple, Some(true_tuple(&j, v).unwrap()));
                    }
                }
            }
        }
    }

    #[test]
    fn corrupted_arc_is_inconsistent() {
        let j = distinct(6);
        let mut h = build_adjacency_graph(&j.deck(), 1, DEFAULT_BUDGET);
        let (&(u, d), &v) = h.arcs.iter().next().unwrap();
        let turned = Direction::from_index((d.index() + 1) % 4);
        h.arcs.insert((u, turned), v);
        let comps = h.components();
        let big = comps.iter().max_by_key(|c| c.len()).unwrap();
        assert_eq!(assemble_component(&h, big), Err(FailureReason::InconsistentComponent));
    }

    #[test]
    fn four_cycle_is_consistent() {
        let tiles = vec![Tile([0; 4]); 4];
        let arcs = BTreeMap::from([
            ((0, Direction::Up), 1),
            ((1, Direction::Right), 2),
            ((2, Direction::Down), 3),
            ((3, Direction::Left), 0),
        ]);
        let h = AdjacencyGraph {
            tiles,
            nodes: vec![0, 1, 2, 3],
            arcs,
            stats: WindowStats::default(),
        };
        let a = assemble_component(&h, &[0, 1, 2, 3]).unwrap();
        assert_eq!(a.occupied(), crate::grid::square(0, 1));
    }

    #[test]
    fn holes_are_filled_when_forced() {
        let j = distinct(5);
        let hole = Vertex::new(3, 3);
        let a = fill_holes(assembly_of(&j, |v| v != hole));
        assert_eq!(a.tile(hole), j.tile_at(hole).ok());
        assert!(a.remaining.is_empty());
        let same = fill_holes(assembly_of(&j, |v| v.x <= 2));
        assert_eq!(same.cells.len(), 10);
    }

    #[test]
    fn duplicate_fillers_leave_the_hole() {
        let j = Jigsaw::constant(JigsawParams::new(3, 2).unwrap(), 0).unwrap();
        let centre = Vertex::new(2, 2);
        let a = fill_holes(assembly_of(&j, |v| v != centre));
        assert_eq!(a.tile(centre), Some(Tile([0; 4])));
        // A second copy of the needed tile in the pool keeps it ambiguous.
        let b = assembly_of(&j, |v| v != centre && v != Vertex::new(1, 1));
        assert_eq!(fill_holes(b).tile(centre), None);
    }

    #[test]
    fn square_examples() {
        let full = crate::grid::square(1, 4);
        assert_eq!(largest_square(&full), Some(Square { corner: Vertex::new(1, 1), side: 4 }));
        let mut l = crate::grid::square(0, 2);
        l.extend((3..6).map(|x| Vertex::new(x, 0)));
        assert_eq!(largest_square(&l), Some(Square { corner: Vertex::ORIGIN, side: 3 }));
        let mut holed = crate::grid::square(0, 4);
        holed.remove(&Vertex::new(2, 2));
        assert_eq!(largest_square(&holed).unwrap().side, 2);
        assert_eq!(largest_square(&VertexSet::new()), None);
    }

    #[test]
    fn central_bulk_extends_to_the_original() {
        let j = distinct(7);
        let mut bulk = assembly_of(&j, |v| (2..=6).contains(&v.x) && (2..=6).contains(&v.y));
        let steps = extend(&mut bulk, 7).unwrap();
        assert_eq!(steps, [1, 1, 1, 1]);
        assert_eq!(emit(&bulk, &j.deck()), j);
    }

    #[test]
    fn full_bulk_is_immediate() {
        let j = distinct(4);
        let mut bulk = assembly_of(&j, |_| true);
        assert_eq!(extend(&mut bulk, 4), Ok([0; 4]));
    }

    #[test]
    fn doubled_candidate_is_ambiguous() {
        // Give the tile above (3, 5) a rival with the same lower colour.
        let j = distinct(6);
        let mut bulk = assembly_of(&j, |v| (1..=6).contains(&v.x) && (1..=5).contains(&v.y));
        let above = j.tile_at(Vertex::new(3, 6)).unwrap();
        let left = j.tile_at(Vertex::new(2, 6)).unwrap();
        let right = j.tile_at(Vertex::new(4, 6)).unwrap();
        let mut rival = above;
        rival.0[0] = 999_999;
        bulk.remaining.put(100, rival);
        // The rival needs its own neighbours to complete a triple.
        bulk.remaining.put(101, left);
        bulk.remaining.put(102, right);
        assert_eq!(extend(&mut bulk, 6), Err(FailureReason::ExtensionAmbiguous));
    }

    #[test]
    fn verify_compares_decks() {
        let j = Jigsaw::generate(JigsawParams::new(4, 5).unwrap(), 3);
        assert!(verify(&j, &j.deck()));
        let other = Jigsaw::generate(JigsawParams::new(3, 5).unwrap(), 3);
        assert!(!verify(&other, &j.deck()));
        let mut stub = j.clone();
        let e = Edge::from_dir(Vertex::new(1, 1), Direction::Left);
        let c = stub.colour(e).unwrap();
        stub.set_colour(e, (c + 1) % 5).unwrap();
        assert!(!verify(&stub, &j.deck()));
    }

    #[test]
    fn json_record_fields() {
        let j = distinct(5);
        let r = reconstruct(&j.deck(), 2, DEFAULT_BUDGET);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["outcome"], "exact");
        assert!(v["reason"].is_null());
        for f in ["s", "components", "nodes_expanded_total", "ms"] {
            assert!(v[f].is_u64(), "{f}");
        }
    }
}
