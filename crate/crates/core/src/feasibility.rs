//! Placement maps and their constraint graphs.
//!
//! A placement map `f: X -> Z²` puts the tile of vertex `f(x)` at position
//! `x`. It is feasible for a jigsaw when every pair of adjacent positions
//! shows matching colours on the shared side. The constraint graph records,
//! for every split edge of `X`, which two jigsaw edges are forced to carry
//! the same colour; `γ(f) = |V| - #components` then gives the exact
//! feasibility probability `q^-γ` for a uniformly random jigsaw.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::grid::{self, Direction, Edge, EdgeSet, Vertex, VertexSet};
use crate::jigsaw::{Colour, Jigsaw, JigsawParams};
use crate::rng::{derive_seed, rng_from};
use crate::union_find::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("map is not injective: {first} and {second} both map to {image}")]
    NotInjective { first: Vertex, second: Vertex, image: Vertex },
    #[error("{0} appears twice in the domain")]
    DuplicateDomain(Vertex),
    #[error("image {image} of {point} lies outside [1, {n}]²")]
    OutsideGrid { point: Vertex, image: Vertex, n: u32 },
}

/// An injective map from a finite subset of Z² into Z².
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PlacementMap {
    map: BTreeMap<Vertex, Vertex>,
}

impl PlacementMap {
    pub fn new(pairs: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self, MapError> {
        let mut map = BTreeMap::new();
        let mut inverse: BTreeMap<Vertex, Vertex> = BTreeMap::new();
        for (x, y) in pairs {
            if map.insert(x, y).is_some() {
                return Err(MapError::DuplicateDomain(x));
            }
            if let Some(&other) = inverse.get(&y) {
                return Err(MapError::NotInjective {
                    first: other,
                    second: x,
                    image: y,
                });
            }
            inverse.insert(y, x);
        }
        Ok(Self { map })
    }

    /// `x -> x + offset` on `domain`.
    pub fn translation(domain: &VertexSet, offset: Vertex) -> Self {
        Self {
            map: domain.iter().map(|&x| (x, x + offset)).collect(),
        }
    }

    pub fn get(&self, x: Vertex) -> Option<Vertex> {
        self.map.get(&x).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.map.iter().map(|(&a, &b)| (a, b))
    }

    pub fn domain(&self) -> VertexSet {
        self.map.keys().copied().collect()
    }

    pub fn image(&self) -> VertexSet {
        self.map.values().copied().collect()
    }

    pub fn restrict(&self, to: &VertexSet) -> PlacementMap {
        PlacementMap {
            map: self
                .map
                .iter()
                .filter(|(x, _)| to.contains(x))
                .map(|(&a, &b)| (a, b))
                .collect(),
        }
    }

    pub fn check_in_grid(&self, n: u32) -> Result<(), MapError> {
        match self.iter().find(|(_, y)| !y.in_grid(n)) {
            Some((point, image)) => Err(MapError::OutsideGrid { point, image, n }),
            None => Ok(()),
        }
    }

    /// Smallest grid side whose `[1, n]²` holds every image, if any does.
    pub fn min_grid_side(&self) -> Option<u32> {
        let mut side = 1;
        for y in self.map.values() {
            if y.x < 1 || y.y < 1 {
                return None;
            }
            side = side.max(y.x as u32).max(y.y as u32);
        }
        Some(side)
    }

    fn offset(&self, x: Vertex) -> Vertex {
        self.map[&x] - x
    }

    /// Whether the induced edge `{x, y}` keeps the two tiles in their
    /// relative position.
    fn is_rigid_pair(&self, x: Vertex, y: Vertex) -> bool {
        self.offset(x) == self.offset(y)
    }
}

/// Maximal connected rigid subsets of the domain. Along a connected rigid
/// set `f(x) - x` is constant, so blocks are the components of the graph of
/// induced edges whose endpoints share an offset.
pub fn blocks(f: &PlacementMap) -> Vec<VertexSet> {
    let domain = f.domain();
    let nonrigid: EdgeSet = grid::induced_edges(&domain)
        .into_iter()
        .filter(|e| {
            let (a, b) = e.endpoints();
            !f.is_rigid_pair(a, b)
        })
        .collect();
    grid::components(&domain, &nonrigid)
}

/// Induced edges whose endpoints lie in different blocks.
pub fn split_edges(f: &PlacementMap) -> EdgeSet {
    let mut block_of: BTreeMap<Vertex, usize> = BTreeMap::new();
    for (i, b) in blocks(f).iter().enumerate() {
        for &v in b {
            block_of.insert(v, i);
        }
    }
    grid::induced_edges(&f.domain())
        .into_iter()
        .filter(|e| {
            let (a, b) = e.endpoints();
            block_of[&a] != block_of[&b]
        })
        .collect()
}

/// Split edges together with the edge boundary of the domain.
pub fn lambda_f(f: &PlacementMap) -> EdgeSet {
    let mut out = split_edges(f);
    out.extend(grid::edge_boundary(&f.domain()));
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintGraph {
    /// Lattice edges spanned by the constraints.
    pub vertices: EdgeSet,
    /// One constraint per split edge, in split-edge order.
    pub constraints: Vec<(Edge, Edge)>,
}

impl ConstraintGraph {
    fn union_find(&self) -> (Vec<Edge>, UnionFind) {
        let verts: Vec<Edge> = self.vertices.iter().copied().collect();
        let index: BTreeMap<Edge, usize> = verts.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut uf = UnionFind::new(verts.len());
        for (a, b) in &self.constraints {
            uf.union(index[a], index[b]);
        }
        (verts, uf)
    }

    pub fn components(&self) -> Vec<EdgeSet> {
        let (verts, mut uf) = self.union_find();
        uf.groups()
            .into_iter()
            .map(|g| g.into_iter().map(|i| verts[i]).collect())
            .collect()
    }

    pub fn component_count(&self) -> usize {
        self.union_find().1.count_sets()
    }

    pub fn gamma(&self) -> usize {
        self.vertices.len() - self.component_count()
    }

    pub fn max_degree(&self) -> usize {
        let mut deg: BTreeMap<Edge, usize> = BTreeMap::new();
        for (a, b) in &self.constraints {
            *deg.entry(*a).or_default() += 1;
            *deg.entry(*b).or_default() += 1;
        }
        deg.values().copied().max().unwrap_or(0)
    }
}

/// For a split edge `{x, x + e_i}` the constraint joins the jigsaw edges
/// `{f(x), f(x) + e_i}` and `{f(x + e_i), f(x + e_i) - e_i}`.
pub fn constraint_graph(f: &PlacementMap) -> ConstraintGraph {
    let mut vertices = EdgeSet::new();
    let mut constraints = Vec::new();
    for e in split_edges(f) {
        let (x, y) = e.endpoints();
        let d = Direction::between(x, y).expect("lattice edge endpoints are adjacent");
        let a = Edge::from_dir(f.map[&x], d);
        let b = Edge::from_dir(f.map[&y], d.opposite());
        vertices.insert(a);
        vertices.insert(b);
        constraints.push((a, b));
    }
    ConstraintGraph { vertices, constraints }
}

pub fn gamma(f: &PlacementMap) -> usize {
    constraint_graph(f).gamma()
}

/// Anything that assigns colours to lattice edges.
pub trait Colouring {
    fn colour_of(&self, e: Edge) -> Option<Colour>;
}

impl Colouring for Jigsaw {
    fn colour_of(&self, e: Edge) -> Option<Colour> {
        self.colour(e)
    }
}

impl Colouring for BTreeMap<Edge, Colour> {
    fn colour_of(&self, e: Edge) -> Option<Colour> {
        self.get(&e).copied()
    }
}

/// Adjacency definition: every adjacent pair of positions shows equal
/// colours on the facing sides. Edges the colouring does not cover count
/// as mismatches.
pub fn is_feasible_by_adjacency<C: Colouring>(j: &C, f: &PlacementMap) -> bool {
    grid::induced_edges(&f.domain()).into_iter().all(|e| {
        let (x, y) = e.endpoints();
        let d = Direction::between(x, y).expect("adjacent");
        let a = j.colour_of(Edge::from_dir(f.map[&x], d));
        let b = j.colour_of(Edge::from_dir(f.map[&y], d.opposite()));
        a.is_some() && a == b
    })
}

/// Component definition: the colouring is constant on every component of
/// the constraint graph.
pub fn is_feasible_by_components<C: Colouring>(j: &C, f: &PlacementMap) -> bool {
    constraint_graph(f).components().iter().all(|comp| {
        let mut colours = comp.iter().map(|&e| j.colour_of(e));
        let first = colours.next().flatten();
        first.is_some() && colours.all(|c| c == first)
    })
}

pub fn is_feasible(j: &Jigsaw, f: &PlacementMap) -> bool {
    is_feasible_by_adjacency(j, f)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityEstimate {
    pub gamma: usize,
    pub exact: f64,
    pub trials: u64,
    pub successes: u64,
    pub empirical: f64,
    /// Binomial standard error `sqrt(p(1-p)/trials)` at the exact `p`.
    pub std_err: f64,
    pub z: f64,
}

impl FeasibilityEstimate {
    pub fn within_sigmas(&self, sigmas: f64) -> bool {
        self.z.abs() <= sigmas
    }
}

/// Fraction of `trials` random `(n, q)`-jigsaws for which `f` is feasible.
///
/// Trial `t` uses the jigsaw `Jigsaw::generate(params, derive_seed([seed, t]))`.
/// Only the edges the constraint graph touches are drawn; because every
/// edge has its own random stream, these colours are exactly those of the
/// full jigsaw.
pub fn feasibility_mc(
    f: &PlacementMap,
    params: JigsawParams,
    trials: u64,
    seed: u64,
) -> Result<FeasibilityEstimate, MapError> {
    f.check_in_grid(params.n())?;
    let graph = constraint_graph(f);
    let g = graph.gamma();
    let probe = Jigsaw::constant(params, 0).expect("colour 0 is valid");
    let edges: Vec<(Edge, usize)> = graph
        .vertices
        .iter()
        .map(|&e| (e, probe.edge_index(e).expect("images lie in the grid")))
        .collect();
    let trials = trials.max(1);
    let successes = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let base = rng_from(derive_seed(&[seed, t]));
            let colours: BTreeMap<Edge, Colour> = edges
                .iter()
                .map(|&(e, i)| (e, sample_edge(&base, i, params.q())))
                .collect();
            is_feasible_by_components(&colours, f)
        })
        .count() as u64;
    let exact = (params.q() as f64).powi(-(g as i32));
    let empirical = successes as f64 / trials as f64;
    let std_err = (exact * (1.0 - exact) / trials as f64).sqrt();
    let z = if std_err > 0.0 {
        (empirical - exact) / std_err
    } else if empirical == exact {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(FeasibilityEstimate {
        gamma: g,
        exact,
        trials,
        successes,
        empirical,
        std_err,
        z,
    })
}

fn sample_edge(base: &rand_chacha::ChaCha8Rng, index: usize, q: u32) -> Colour {
    use rand::Rng;
    let mut rng = base.clone();
    rng.set_stream(index as u64);
    rng.gen_range(0..q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{square, Axis};

    type Pair = ((i32, i32), (i32, i32));

    fn v(x: i32, y: i32) -> Vertex {
        Vertex::new(x, y)
    }

    fn map(pairs: &[Pair]) -> PlacementMap {
        PlacementMap::new(pairs.iter().map(|&((a, b), (c, d))| (v(a, b), v(c, d)))).unwrap()
    }

    #[test]
    fn rejects_non_injective() {
        assert!(matches!(
            PlacementMap::new([(v(0, 0), v(1, 1)), (v(1, 0), v(1, 1))]),
            Err(MapError::NotInjective { .. })
        ));
        assert!(matches!(
            PlacementMap::new([(v(0, 0), v(1, 1)), (v(0, 0), v(2, 1))]),
            Err(MapError::DuplicateDomain(_))
        ));
    }

    #[test]
    fn translation_is_one_block() {
        let f = PlacementMap::translation(&square(-1, 1), v(5, 5));
        assert_eq!(blocks(&f).len(), 1);
        assert!(split_edges(&f).is_empty());
        assert_eq!(lambda_f(&f), grid::edge_boundary(&f.domain()));
        let g = constraint_graph(&f);
        assert!(g.vertices.is_empty());
        assert_eq!(g.gamma(), 0);
    }

    #[test]
    fn two_singletons() {
        let f = map(&[((0, 0), (5, 5)), ((1, 0), (9, 9))]);
        assert_eq!(blocks(&f).len(), 2);
        let split = split_edges(&f);
        assert_eq!(split, [Edge::new(v(0, 0), Axis::Horizontal)].into());
        assert_eq!(lambda_f(&f).len(), split.len() + grid::edge_boundary(&f.domain()).len());
        let g = constraint_graph(&f);
        assert_eq!(
            g.constraints,
            vec![(Edge::between(v(5, 5), v(6, 5)).unwrap(), Edge::between(v(9, 9), v(8, 9)).unwrap())]
        );
        assert_eq!(g.gamma(), 1);
    }

    #[test]
    fn path_with_a_displaced_end() {
        let f = map(&[((0, 0), (3, 3)), ((1, 0), (4, 3)), ((2, 0), (8, 1))]);
        let mut sizes: Vec<usize> = blocks(&f).iter().map(|b| b.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2]);
    }

    #[test]
    fn feasibility_of_gamma_one_map() {
        let f = map(&[((0, 0), (5, 5)), ((1, 0), (9, 9))]);
        let params = JigsawParams::new(10, 3).unwrap();
        let a = Edge::between(v(5, 5), v(6, 5)).unwrap();
        let b = Edge::between(v(9, 9), v(8, 9)).unwrap();
        for seed in 0..50 {
            let j = Jigsaw::generate(params, seed);
            let expect = j.colour(a) == j.colour(b);
            assert_eq!(is_feasible(&j, &f), expect);
            assert_eq!(is_feasible_by_components(&j, &f), expect);
        }
    }

    #[test]
    fn translations_inside_the_grid_are_feasible() {
        let params = JigsawParams::new(8, 2).unwrap();
        let f = PlacementMap::translation(&square(-2, 2), v(4, 4));
        for seed in 0..20 {
            assert!(is_feasible(&Jigsaw::generate(params, seed), &f));
        }
    }

    #[test]
    fn monte_carlo_gamma_zero_is_exact() {
        let f = PlacementMap::translation(&square(-1, 1), v(3, 3));
        let est = feasibility_mc(&f, JigsawParams::new(5, 10).unwrap(), 1000, 3).unwrap();
        assert_eq!(est.gamma, 0);
        assert_eq!(est.empirical, 1.0);
        assert_eq!(est.z, 0.0);
    }

    #[test]
    fn monte_carlo_matches_full_generation() {
        // The sparse sampler must see the same colours as the full jigsaw.
        let f = map(&[((0, 0), (1, 1)), ((1, 0), (4, 4)), ((0, 1), (2, 4))]);
        let params = JigsawParams::new(4, 3).unwrap();
        let est = feasibility_mc(&f, params, 300, 77).unwrap();
        let direct = (0..300u64)
            .filter(|&t| is_feasible(&Jigsaw::generate(params, derive_seed(&[77, t])), &f))
            .count() as u64;
        assert_eq!(est.successes, direct);
    }

    #[test]
    fn monte_carlo_rejects_maps_outside_the_grid() {
        let f = map(&[((0, 0), (0, 1))]);
        assert!(feasibility_mc(&f, JigsawParams::new(3, 2).unwrap(), 10, 0).is_err());
    }
}
