//! Jigsaws, tiles and decks.
//!
//! An `(n, q)`-jigsaw colours every edge of the extended `n × n` grid, i.e.
//! every lattice edge with at least one endpoint in `[1, n]²`; there are
//! `2n(n+1)` of them. Colours are `0..q` (zero-based).

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grid::{Axis, Direction, Edge, Vertex};
use crate::rng::rng_from;

pub type Colour = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamsError {
    #[error("grid side n must be at least 1 (got {0})")]
    SideTooSmall(u32),
    #[error("number of colours q must be at least 2 (got {0})")]
    TooFewColours(u32),
    #[error("grid side n = {0} is too large")]
    SideTooLarge(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JigsawParams {
    n: u32,
    q: u32,
}

impl JigsawParams {
    pub fn new(n: u32, q: u32) -> Result<Self, ParamsError> {
        if n < 1 {
            return Err(ParamsError::SideTooSmall(n));
        }
        if n > 1 << 15 {
            return Err(ParamsError::SideTooLarge(n));
        }
        if q < 2 {
            return Err(ParamsError::TooFewColours(q));
        }
        Ok(Self { n, q })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// `2n(n+1)`.
    pub fn edge_count(&self) -> usize {
        let n = self.n as usize;
        2 * n * (n + 1)
    }

    pub fn tile_count(&self) -> usize {
        (self.n as usize).pow(2)
    }
}

/// Colours of the edges at one vertex, ordered up, right, down, left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tile(pub [Colour; 4]);

impl Tile {
    pub fn side(&self, d: Direction) -> Colour {
        self.0[d.index()]
    }

    pub fn up(&self) -> Colour {
        self.0[0]
    }

    pub fn right(&self) -> Colour {
        self.0[1]
    }

    pub fn down(&self) -> Colour {
        self.0[2]
    }

    pub fn left(&self) -> Colour {
        self.0[3]
    }

    /// Whether `other`, placed one step in direction `d` from this tile,
    /// agrees on the shared edge.
    pub fn fits(&self, d: Direction, other: &Tile) -> bool {
        self.side(d) == other.side(d.opposite())
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "{a} {b} {c} {d}")
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Jigsaw {
    params: JigsawParams,
    /// Edges `{(x,y),(x+1,y)}` for `y in 1..=n`, `x in 0..=n`, row-major.
    horizontal: Vec<Colour>,
    /// Edges `{(x,y),(x,y+1)}` for `y in 0..=n`, `x in 1..=n`, row-major.
    vertical: Vec<Colour>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JigsawError {
    #[error("vertex {0} is outside the grid")]
    OutsideGrid(Vertex),
    #[error("edge {0} is not an edge of the extended grid")]
    NotGridEdge(Edge),
    #[error("colour {colour} is not below q = {q}")]
    ColourOutOfRange { colour: Colour, q: u32 },
    #[error("expected {expected} edge colours, got {got}")]
    WrongEdgeCount { expected: usize, got: usize },
}

impl Jigsaw {
    /// Jigsaw with every edge coloured `colour`.
    pub fn constant(params: JigsawParams, colour: Colour) -> Result<Self, JigsawError> {
        if colour >= params.q {
            return Err(JigsawError::ColourOutOfRange { colour, q: params.q });
        }
        let half = params.edge_count() / 2;
        Ok(Self {
            params,
            horizontal: vec![colour; half],
            vertical: vec![colour; half],
        })
    }

    /// Builds a jigsaw from colours listed in canonical edge order (see
    /// [`Jigsaw::edges`]).
    pub fn from_colours(params: JigsawParams, colours: Vec<Colour>) -> Result<Self, JigsawError> {
        if colours.len() != params.edge_count() {
            return Err(JigsawError::WrongEdgeCount {
                expected: params.edge_count(),
                got: colours.len(),
            });
        }
        if let Some(&colour) = colours.iter().find(|&&c| c >= params.q) {
            return Err(JigsawError::ColourOutOfRange { colour, q: params.q });
        }
        let mut horizontal = colours;
        let vertical = horizontal.split_off(params.edge_count() / 2);
        Ok(Self {
            params,
            horizontal,
            vertical,
        })
    }

    /// Uniformly random jigsaw. Edge `i` (canonical order) draws its colour
    /// from stream `i` of a `ChaCha8Rng` keyed by `seed`.
    pub fn generate(params: JigsawParams, seed: u64) -> Self {
        let base = rng_from(seed);
        let colours = (0..params.edge_count())
            .map(|i| edge_colour(&base, i as u64, params.q))
            .collect();
        Self::from_colours(params, colours).expect("generated colours are in range")
    }

    pub fn params(&self) -> JigsawParams {
        self.params
    }

    pub fn n(&self) -> u32 {
        self.params.n
    }

    /// Position of `e` in canonical edge order, if it belongs to the
    /// extended grid.
    pub fn edge_index(&self, e: Edge) -> Option<usize> {
        let n = self.params.n as i32;
        let Vertex { x, y } = e.base;
        match e.axis {
            Axis::Horizontal if (0..=n).contains(&x) && (1..=n).contains(&y) => {
                Some(((y - 1) * (n + 1) + x) as usize)
            }
            Axis::Vertical if (1..=n).contains(&x) && (0..=n).contains(&y) => {
                Some(self.horizontal.len() + (y * n + (x - 1)) as usize)
            }
            _ => None,
        }
    }

    /// All edges of the extended grid in canonical order: horizontal edges
    /// row by row, then vertical edges row by row.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let n = self.params.n as i32;
        let h = (1..=n).flat_map(move |y| (0..=n).map(move |x| Edge::new(Vertex::new(x, y), Axis::Horizontal)));
        let v = (0..=n).flat_map(move |y| (1..=n).map(move |x| Edge::new(Vertex::new(x, y), Axis::Vertical)));
        h.chain(v)
    }

    /// Colours in canonical edge order.
    pub fn colours(&self) -> impl Iterator<Item = Colour> + '_ {
        self.horizontal.iter().chain(self.vertical.iter()).copied()
    }

    pub fn colour(&self, e: Edge) -> Option<Colour> {
        self.edge_index(e).map(|i| self.colour_at(i))
    }

    fn colour_at(&self, i: usize) -> Colour {
        if i < self.horizontal.len() {
            self.horizontal[i]
        } else {
            self.vertical[i - self.horizontal.len()]
        }
    }

    pub fn set_colour(&mut self, e: Edge, colour: Colour) -> Result<(), JigsawError> {
        if colour >= self.params.q {
            return Err(JigsawError::ColourOutOfRange { colour, q: self.params.q });
        }
        let i = self.edge_index(e).ok_or(JigsawError::NotGridEdge(e))?;
        if i < self.horizontal.len() {
            self.horizontal[i] = colour;
        } else {
            let j = i - self.horizontal.len();
            self.vertical[j] = colour;
        }
        Ok(())
    }

    pub fn tile_at(&self, v: Vertex) -> Result<Tile, JigsawError> {
        if !v.in_grid(self.params.n) {
            return Err(JigsawError::OutsideGrid(v));
        }
        Ok(Tile(Direction::ALL.map(|d| {
            self.colour(Edge::from_dir(v, d))
                .expect("edges at a grid vertex belong to the extended grid")
        })))
    }

    /// Tiles of all grid vertices, row-major from `(1,1)`.
    pub fn tiles(&self) -> impl Iterator<Item = (Vertex, Tile)> + '_ {
        let n = self.params.n as i32;
        (1..=n).flat_map(move |y| {
            (1..=n).map(move |x| {
                let v = Vertex::new(x, y);
                (v, self.tile_at(v).expect("in grid"))
            })
        })
    }

    pub fn deck(&self) -> Deck {
        let mut counts = BTreeMap::new();
        for (_, t) in self.tiles() {
            *counts.entry(t).or_insert(0) += 1;
        }
        Deck {
            params: self.params,
            counts,
        }
    }

    pub fn all_colours_distinct(&self) -> bool {
        let mut seen: Vec<Colour> = self.colours().collect();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    pub fn duplicate_stats(&self) -> DuplicateStats {
        let mut buckets: BTreeMap<Tile, Vec<Vertex>> = BTreeMap::new();
        for (v, t) in self.tiles() {
            buckets.entry(t).or_default().push(v);
        }
        let mut stats = DuplicateStats::default();
        for vs in buckets.values() {
            let m = vs.len() as u64;
            stats.x1 += m * (m - 1);
            for (i, &u) in vs.iter().enumerate() {
                for &w in &vs[i + 1..] {
                    if u.distance(w) <= 2 {
                        stats.x2 += 2;
                    }
                }
            }
        }
        stats
    }
}

fn edge_colour(base: &ChaCha8Rng, stream: u64, q: u32) -> Colour {
    let mut rng = base.clone();
    rng.set_stream(stream);
    rng.gen_range(0..q)
}

/// Ordered pairs `u != v` of grid vertices carrying equal tiles (`x1`), and
/// those among them at distance at most two (`x2`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DuplicateStats {
    pub x1: u64,
    pub x2: u64,
}

/// Multiset of tiles.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Deck {
    params: JigsawParams,
    counts: BTreeMap<Tile, u32>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeckError {
    #[error("deck holds {got} tiles, expected n² = {expected}")]
    WrongSize { expected: usize, got: usize },
    #[error("tile {tile} uses a colour not below q = {q}")]
    ColourOutOfRange { tile: Tile, q: u32 },
}

impl Deck {
    pub fn from_tiles(params: JigsawParams, tiles: impl IntoIterator<Item = Tile>) -> Result<Self, DeckError> {
        let mut counts = BTreeMap::new();
        let mut total = 0usize;
        for t in tiles {
            if t.0.iter().any(|&c| c >= params.q) {
                return Err(DeckError::ColourOutOfRange { tile: t, q: params.q });
            }
            *counts.entry(t).or_insert(0) += 1;
            total += 1;
        }
        if total != params.tile_count() {
            return Err(DeckError::WrongSize {
                expected: params.tile_count(),
                got: total,
            });
        }
        Ok(Self { params, counts })
    }

    pub fn params(&self) -> JigsawParams {
        self.params
    }

    pub fn total(&self) -> usize {
        self.counts.values().map(|&c| c as usize).sum()
    }

    pub fn multiplicity(&self, t: &Tile) -> u32 {
        self.counts.get(t).copied().unwrap_or(0)
    }

    pub fn contains(&self, t: &Tile) -> bool {
        self.counts.contains_key(t)
    }

    /// Distinct tiles with their multiplicities, in ascending tile order.
    pub fn counts(&self) -> &BTreeMap<Tile, u32> {
        &self.counts
    }

    /// Every tile, repeated by multiplicity, in ascending order.
    pub fn sorted_tiles(&self) -> Vec<Tile> {
        self.counts
            .iter()
            .flat_map(|(t, &c)| std::iter::repeat_n(*t, c as usize))
            .collect()
    }
}
