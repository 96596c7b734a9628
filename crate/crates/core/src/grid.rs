//! Lattice primitives on Z²: vertices, directions, canonical edges, and the
//! edge-set operators (induced edges, boundaries, connectivity, dual
//! connectivity) that the rest of the crate is built on.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::union_find::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Vertex {
    pub x: i32,
    pub y: i32,
}

impl Vertex {
    pub const ORIGIN: Vertex = Vertex { x: 0, y: 0 };

    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn step(self, d: Direction) -> Vertex {
        self + d.delta()
    }

    /// Graph distance in the infinite grid.
    pub fn distance(self, other: Vertex) -> u32 {
        (self.x - other.x).unsigned_abs() + (self.y - other.y).unsigned_abs()
    }

    pub fn neighbours(self) -> [Vertex; 4] {
        Direction::ALL.map(|d| self.step(d))
    }

    /// True if the vertex lies in `[1, n]²`.
    pub fn in_grid(self, n: u32) -> bool {
        let n = n as i32;
        (1..=n).contains(&self.x) && (1..=n).contains(&self.y)
    }
}

impl Add for Vertex {
    type Output = Vertex;
    fn add(self, o: Vertex) -> Vertex {
        Vertex::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vertex {
    type Output = Vertex;
    fn sub(self, o: Vertex) -> Vertex {
        Vertex::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vertex {
    type Output = Vertex;
    fn neg(self) -> Vertex {
        Vertex::new(-self.x, -self.y)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// The four unit steps, in tile order: up (0,1), right (1,0), down (0,-1),
/// left (-1,0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Up,
    Right,
    Down,
    Left,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Up,
        Direction::Right,
        Direction::Down,
        Direction::Left,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn from_index(i: usize) -> Direction {
        Direction::ALL[i & 3]
    }

    pub const fn delta(self) -> Vertex {
        match self {
            Direction::Up => Vertex::new(0, 1),
            Direction::Right => Vertex::new(1, 0),
            Direction::Down => Vertex::new(0, -1),
            Direction::Left => Vertex::new(-1, 0),
        }
    }

    pub const fn opposite(self) -> Direction {
        Direction::from_index(self.index() + 2)
    }

    /// Direction of the unit step `to - from`, if they are adjacent.
    pub fn between(from: Vertex, to: Vertex) -> Option<Direction> {
        let d = to - from;
        Direction::ALL.into_iter().find(|dir| dir.delta() == d)
    }

    pub fn axis(self) -> Axis {
        match self {
            Direction::Up | Direction::Down => Axis::Vertical,
            Direction::Left | Direction::Right => Axis::Horizontal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// An undirected lattice edge `{base, base + (1,0)}` (horizontal) or
/// `{base, base + (0,1)}` (vertical). The base is always the
/// lexicographically smaller endpoint, so every edge has one representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub base: Vertex,
    pub axis: Axis,
}

impl Edge {
    pub const fn new(base: Vertex, axis: Axis) -> Self {
        Self { base, axis }
    }

    /// The edge from `v` in direction `d`.
    pub fn from_dir(v: Vertex, d: Direction) -> Edge {
        match d {
            Direction::Up => Edge::new(v, Axis::Vertical),
            Direction::Right => Edge::new(v, Axis::Horizontal),
            Direction::Down => Edge::new(v.step(Direction::Down), Axis::Vertical),
            Direction::Left => Edge::new(v.step(Direction::Left), Axis::Horizontal),
        }
    }

    pub fn between(u: Vertex, v: Vertex) -> Option<Edge> {
        Direction::between(u, v).map(|d| Edge::from_dir(u, d))
    }

    pub fn endpoints(self) -> (Vertex, Vertex) {
        let other = match self.axis {
            Axis::Horizontal => self.base.step(Direction::Right),
            Axis::Vertical => self.base.step(Direction::Up),
        };
        (self.base, other)
    }

    pub fn is_incident(self, v: Vertex) -> bool {
        let (a, b) = self.endpoints();
        a == v || b == v
    }

    /// The two unit faces (named by their lower-left corner) on either side
    /// of the edge; the edge's dual joins them.
    pub fn faces(self) -> [Vertex; 2] {
        let Vertex { x, y } = self.base;
        match self.axis {
            Axis::Horizontal => [Vertex::new(x, y - 1), Vertex::new(x, y)],
            Axis::Vertical => [Vertex::new(x - 1, y), Vertex::new(x, y)],
        }
    }

    pub fn translate(self, by: Vertex) -> Edge {
        Edge::new(self.base + by, self.axis)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.endpoints();
        write!(f, "{{{a}, {b}}}")
    }
}

pub type VertexSet = BTreeSet<Vertex>;
pub type EdgeSet = BTreeSet<Edge>;

/// The square `[lo, hi]²`.
pub fn square(lo: i32, hi: i32) -> VertexSet {
    (lo..=hi)
        .flat_map(|x| (lo..=hi).map(move |y| Vertex::new(x, y)))
        .collect()
}

/// The grid `[n]² = [1, n]²`.
pub fn grid(n: u32) -> VertexSet {
    square(1, n as i32)
}

pub fn incident_edges(v: Vertex) -> [Edge; 4] {
    Direction::ALL.map(|d| Edge::from_dir(v, d))
}

/// Edges with both endpoints in `x`.
pub fn induced_edges(x: &VertexSet) -> EdgeSet {
    let mut out = EdgeSet::new();
    for &v in x {
        for d in [Direction::Right, Direction::Up] {
            if x.contains(&v.step(d)) {
                out.insert(Edge::from_dir(v, d));
            }
        }
    }
    out
}

/// Edges with exactly one endpoint in `x`.
pub fn edge_boundary(x: &VertexSet) -> EdgeSet {
    let mut out = EdgeSet::new();
    for &v in x {
        for d in Direction::ALL {
            if !x.contains(&v.step(d)) {
                out.insert(Edge::from_dir(v, d));
            }
        }
    }
    out
}

/// Edges with at least one endpoint in `x`.
pub fn closed_edges(x: &VertexSet) -> EdgeSet {
    x.iter().flat_map(|&v| incident_edges(v)).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Boundaries {
    /// All edges between `X` and its complement.
    pub boundary: EdgeSet,
    /// Boundary edges whose outside endpoint lies in the infinite component
    /// of the complement.
    pub external: EdgeSet,
    /// `boundary \ external`.
    pub internal: EdgeSet,
    /// Vertices of `X` incident to an external edge.
    pub vertex_boundary: VertexSet,
}

/// Vertices of `Z² \ X` inside the bounding box of `X` inflated by one that
/// are connected to infinity.
fn exterior(x: &VertexSet) -> VertexSet {
    let mut out = VertexSet::new();
    let (Some(first), Some(_)) = (x.first(), x.last()) else {
        return out;
    };
    let (mut x0, mut x1, mut y0, mut y1) = (first.x, first.x, first.y, first.y);
    for v in x {
        x0 = x0.min(v.x);
        x1 = x1.max(v.x);
        y0 = y0.min(v.y);
        y1 = y1.max(v.y);
    }
    let (x0, x1, y0, y1) = (x0 - 1, x1 + 1, y0 - 1, y1 + 1);
    let inside = |v: Vertex| (x0..=x1).contains(&v.x) && (y0..=y1).contains(&v.y);
    let start = Vertex::new(x0, y0);
    let mut queue = VecDeque::from([start]);
    out.insert(start);
    while let Some(v) = queue.pop_front() {
        for w in v.neighbours() {
            if inside(w) && !x.contains(&w) && out.insert(w) {
                queue.push_back(w);
            }
        }
    }
    out
}

pub fn boundaries(x: &VertexSet) -> Boundaries {
    let outside = exterior(x);
    let mut b = Boundaries::default();
    for &v in x {
        for d in Direction::ALL {
            let w = v.step(d);
            if x.contains(&w) {
                continue;
            }
            let e = Edge::from_dir(v, d);
            b.boundary.insert(e);
            if outside.contains(&w) {
                b.external.insert(e);
                b.vertex_boundary.insert(v);
            } else {
                b.internal.insert(e);
            }
        }
    }
    b
}

pub fn external_boundary(x: &VertexSet) -> EdgeSet {
    boundaries(x).external
}

/// Connected components of the graph on `x` whose edges are
/// `induced_edges(x) \ deleted`. Components are returned in order of their
/// smallest vertex.
pub fn components(x: &VertexSet, deleted: &EdgeSet) -> Vec<VertexSet> {
    let verts: Vec<Vertex> = x.iter().copied().collect();
    let index: BTreeMap<Vertex, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(verts.len());
    for (i, &v) in verts.iter().enumerate() {
        for d in [Direction::Right, Direction::Up] {
            let w = v.step(d);
            if let Some(&j) = index.get(&w) {
                if !deleted.contains(&Edge::from_dir(v, d)) {
                    uf.union(i, j);
                }
            }
        }
    }
    uf.groups()
        .into_iter()
        .map(|g| g.into_iter().map(|i| verts[i]).collect())
        .collect()
}

pub fn is_connected(x: &VertexSet) -> bool {
    components(x, &EdgeSet::new()).len() <= 1
}

/// Partition of `a` into maximal dual-connected parts. Two edges are
/// dual-adjacent when their dual edges share an endpoint, i.e. when they lie
/// on a common unit face.
pub fn dual_components(a: &EdgeSet) -> Vec<EdgeSet> {
    let edges: Vec<Edge> = a.iter().copied().collect();
    let mut by_face: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut uf = UnionFind::new(edges.len());
    for (i, e) in edges.iter().enumerate() {
        for face in e.faces() {
            match by_face.get(&face) {
                Some(&j) => {
                    uf.union(i, j);
                }
                None => {
                    by_face.insert(face, i);
                }
            }
        }
    }
    uf.groups()
        .into_iter()
        .map(|g| g.into_iter().map(|i| edges[i]).collect())
        .collect()
}

pub fn is_dual_connected(a: &EdgeSet) -> bool {
    dual_components(a).len() <= 1
}

/// The dual-connected component of `a` containing `seed`.
pub fn dual_component_of(a: &EdgeSet, seed: Edge) -> Option<EdgeSet> {
    dual_components(a).into_iter().find(|c| c.contains(&seed))
}

/// True iff `[n]² \ x` is connected (the empty set counts as connected).
pub fn complement_connected(n: u32, x: &VertexSet) -> bool {
    let rest: VertexSet = grid(n).into_iter().filter(|v| !x.contains(v)).collect();
    is_connected(&rest)
}
