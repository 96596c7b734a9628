//! Enumeration of feasible `(2k+1)×(2k+1)` windows around a deck tile.
//!
//! The centre tile sits at the origin and the remaining positions of
//! `[-k, k]²` are filled in a spiral, ring by ring. Only the set of distinct
//! neighbour tuples `(t₁, t₂, t₃, t₄)` (the tiles at `e₁..e₄`) matters, so
//! once ring 1 is placed the search only asks whether *some* completion
//! exists, and skips tuples it has already seen.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::grid::{Direction, Vertex};
use crate::jigsaw::{Colour, Deck, Jigsaw, Tile};

/// Neighbour tiles of a window centre, in direction order up, right, down, left.
pub type Tuple = [Tile; 4];

/// `max(1, ⌈ln n⌉)`.
pub fn default_k(n: u32) -> u32 {
    ((n.max(1) as f64).ln().ceil() as u32).max(1)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WindowError {
    #[error("centre tile {0} does not occur in the deck")]
    CentreNotInDeck(Tile),
    #[error("window radius must be at least 1")]
    ZeroRadius,
    #[error("vertex {0} has a neighbour outside the grid")]
    NearBoundary(Vertex),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowStatus {
    UniqueTuple,
    Ambiguous,
    NoWindow,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowOutcome {
    pub status: WindowStatus,
    /// Present exactly when `status` is `UniqueTuple`.
    pub tuple: Option<Tuple>,
    pub nodes_expanded: u64,
}

/// Distinct deck tiles with lookup by one or two constrained sides.
#[derive(Clone, Debug)]
pub struct TileIndex {
    kinds: Vec<Tile>,
    counts: Vec<u32>,
    by_side: [HashMap<Colour, Vec<u32>>; 4],
    /// Keyed by side pair `(a, b)` with `a < b`, stored at `a * 4 + b`.
    by_pair: Vec<HashMap<(Colour, Colour), Vec<u32>>>,
    kind_of: HashMap<Tile, u32>,
}

impl TileIndex {
    pub fn new(deck: &Deck) -> Self {
        let kinds: Vec<Tile> = deck.counts().keys().copied().collect();
        let counts: Vec<u32> = deck.counts().values().copied().collect();
        let mut by_side: [HashMap<Colour, Vec<u32>>; 4] = Default::default();
        let mut by_pair: Vec<HashMap<(Colour, Colour), Vec<u32>>> = vec![HashMap::new(); 16];
        let mut kind_of = HashMap::with_capacity(kinds.len());
        for (i, t) in kinds.iter().enumerate() {
            let id = i as u32;
            kind_of.insert(*t, id);
            for a in 0..4 {
                by_side[a].entry(t.0[a]).or_default().push(id);
                for b in a + 1..4 {
                    by_pair[a * 4 + b].entry((t.0[a], t.0[b])).or_default().push(id);
                }
            }
        }
        TileIndex {
            kinds,
            counts,
            by_side,
            by_pair,
            kind_of,
        }
    }

    pub fn kinds(&self) -> &[Tile] {
        &self.kinds
    }

    pub fn tile(&self, id: u32) -> Tile {
        self.kinds[id as usize]
    }

    pub fn multiplicity(&self, id: u32) -> u32 {
        self.counts[id as usize]
    }

    pub fn id_of(&self, t: &Tile) -> Option<u32> {
        self.kind_of.get(t).copied()
    }

    /// Kinds whose side `d` has colour `c` for every `(d, c)` in
    /// `constraints`, ignoring multiplicities. With no constraints every
    /// kind matches.
    pub fn matching(&self, constraints: &[(Direction, Colour)]) -> Vec<u32> {
        let fits = |id: &u32| constraints.iter().all(|&(d, c)| self.tile(*id).side(d) == c);
        match constraints {
            [] => (0..self.kinds.len() as u32).collect(),
            [(d, c)] => self.by_side[d.index()].get(c).cloned().unwrap_or_default(),
            [(d1, c1), (d2, c2), ..] => {
                let (a, b, ca, cb) = if d1.index() < d2.index() {
                    (d1.index(), d2.index(), *c1, *c2)
                } else {
                    (d2.index(), d1.index(), *c2, *c1)
                };
                self.by_pair[a * 4 + b]
                    .get(&(ca, cb))
                    .map(|v| v.iter().copied().filter(fits).collect())
                    .unwrap_or_default()
            }
        }
    }
}

/// Positions of `[-k, k]²` in spiral order: the origin, then ring `r` for
/// `r = 1..=k`, starting at `(r, 1-r)` and running up, left, down, right.
pub fn spiral(k: u32) -> Vec<Vertex> {
    let mut out = vec![Vertex::ORIGIN];
    for r in 1..=k as i32 {
        for y in 1 - r..=r {
            out.push(Vertex::new(r, y));
        }
        for x in (-r..r).rev() {
            out.push(Vertex::new(x, r));
        }
        for y in (-r..r).rev() {
            out.push(Vertex::new(-r, y));
        }
        for x in 1 - r..=r {
            out.push(Vertex::new(x, -r));
        }
    }
    out
}

struct Search<'a> {
    index: &'a TileIndex,
    counts: Vec<u32>,
    /// For each position, the earlier positions adjacent to it and the
    /// direction towards them.
    neighbours: Vec<Vec<(Direction, usize)>>,
    /// Positions of the centre's neighbours, in tuple order.
    tuple_slots: [usize; 4],
    placed: Vec<u32>,
    nodes: u64,
    budget: u64,
    found: BTreeSet<Tuple>,
    stop_at: usize,
    halted: Option<WindowStatus>,
}

impl<'a> Search<'a> {
    fn new(index: &'a TileIndex, k: u32, budget: u64, stop_at: usize) -> Self {
        let order = spiral(k);
        let pos: HashMap<Vertex, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let neighbours = order
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                Direction::ALL
                    .iter()
                    .filter_map(|&d| pos.get(&v.step(d)).filter(|&&j| j < i).map(|&j| (d, j)))
                    .collect()
            })
            .collect();
        let tuple_slots = Direction::ALL.map(|d| pos[&Vertex::ORIGIN.step(d)]);
        Search {
            index,
            counts: index.counts.clone(),
            neighbours,
            tuple_slots,
            placed: Vec::with_capacity(order.len()),
            nodes: 0,
            budget,
            found: BTreeSet::new(),
            stop_at,
            halted: None,
        }
    }

    fn place(&mut self, id: u32) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.halted = Some(WindowStatus::BudgetExceeded);
            return false;
        }
        self.counts[id as usize] -= 1;
        self.placed.push(id);
        true
    }

    fn unplace(&mut self) {
        let id = self.placed.pop().unwrap();
        self.counts[id as usize] += 1;
    }

    fn candidates(&self, p: usize) -> Vec<u32> {
        let constraints: Vec<(Direction, Colour)> = self.neighbours[p]
            .iter()
            .map(|&(d, j)| (d, self.index.tile(self.placed[j]).side(d.opposite())))
            .collect();
        let mut ids = self.index.matching(&constraints);
        ids.retain(|&id| self.counts[id as usize] > 0);
        ids
    }

    fn tuple(&self) -> Tuple {
        self.tuple_slots.map(|j| self.index.tile(self.placed[j]))
    }

    /// Depth-first over positions `p..`. Before ring 1 is complete it
    /// branches over every candidate; after that it returns `true` at the
    /// first completion.
    fn run(&mut self, p: usize) -> bool {
        if self.halted.is_some() {
            return false;
        }
        // Positions 1..=8 are ring 1, which holds the whole tuple.
        if p == 9 {
            let t = self.tuple();
            if self.found.contains(&t) {
                return false;
            }
            if self.complete(p) {
                self.found.insert(t);
                if self.found.len() >= self.stop_at {
                    self.halted = Some(WindowStatus::Ambiguous);
                }
                return true;
            }
            return false;
        }
        for id in self.candidates(p) {
            if !self.place(id) {
                return false;
            }
            self.run(p + 1);
            self.unplace();
            if self.halted.is_some() {
                return false;
            }
        }
        false
    }

    /// Whether positions `p..` can be completed. Existence only.
    fn complete(&mut self, p: usize) -> bool {
        if p == self.neighbours.len() {
            return true;
        }
        for id in self.candidates(p) {
            if !self.place(id) {
                return false;
            }
            let ok = self.complete(p + 1);
            self.unplace();
            if ok {
                return true;
            }
            if self.halted.is_some() {
                return false;
            }
        }
        false
    }
}

fn start<'a>(index: &'a TileIndex, centre: &Tile, k: u32, budget: u64, stop_at: usize) -> Result<Search<'a>, WindowError> {
    if k == 0 {
        return Err(WindowError::ZeroRadius);
    }
    let id = index
        .id_of(centre)
        .filter(|&id| index.multiplicity(id) > 0)
        .ok_or(WindowError::CentreNotInDeck(*centre))?;
    let mut s = Search::new(index, k, budget, stop_at);
    if s.place(id) {
        s.run(1);
    }
    Ok(s)
}

/// Searches the windows around `centre`, stopping as soon as two distinct
/// neighbour tuples are seen or more than `budget` tiles have been placed
/// (the centre counts as one).
pub fn enumerate_windows_indexed(index: &TileIndex, centre: &Tile, k: u32, budget: u64) -> Result<WindowOutcome, WindowError> {
    let s = start(index, centre, k, budget, 2)?;
    let (status, tuple) = match (s.halted, s.found.len()) {
        (Some(status), _) => (status, None),
        (None, 0) => (WindowStatus::NoWindow, None),
        (None, _) => (WindowStatus::UniqueTuple, s.found.first().copied()),
    };
    Ok(WindowOutcome {
        status,
        tuple,
        nodes_expanded: s.nodes,
    })
}

pub fn enumerate_windows(deck: &Deck, centre: &Tile, k: u32, budget: u64) -> Result<WindowOutcome, WindowError> {
    enumerate_windows_indexed(&TileIndex::new(deck), centre, k, budget)
}

/// Every distinct neighbour tuple over all feasible windows around
/// `centre`, or `None` if the budget runs out first.
pub fn collect_tuples(deck: &Deck, centre: &Tile, k: u32, budget: u64) -> Result<Option<BTreeSet<Tuple>>, WindowError> {
    let index = TileIndex::new(deck);
    let s = start(&index, centre, k, budget, usize::MAX)?;
    Ok(match s.halted {
        Some(_) => None,
        None => Some(s.found),
    })
}

/// The tiles around `v` in `j`, in direction order.
pub fn true_tuple(j: &Jigsaw, v: Vertex) -> Result<Tuple, WindowError> {
    let n = j.n();
    if !Direction::ALL.iter().all(|&d| v.step(d).in_grid(n)) || !v.in_grid(n) {
        return Err(WindowError::NearBoundary(v));
    }
    Ok(Direction::ALL.map(|d| j.tile_at(v.step(d)).expect("checked in grid")))
}
