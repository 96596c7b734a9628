//! Templates: an edge set `A` inside the window `[-k, k]²` together with a
//! partial placement `h` defined on the quasiblocks of `A`.
//!
//! [`validate_template`] checks the seven defining conditions and computes
//! the type `(δ, r₁, r₂)` from the cluster graph. [`sample_template`] draws
//! templates from a family of random block placements, extracting `A` as
//! the dual-connected piece of `Λ_f` through a split edge at the origin.

use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;

use crate::feasibility::{self, PlacementMap};
use crate::grid::{self, Edge, EdgeSet, Vertex, VertexSet};
use crate::jigsaw::JigsawParams;
use crate::rng::rng_from;
use crate::union_find::UnionFind;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub k: u32,
    /// The edge set `A ⊆ Λ̄([-k, k]²)`.
    pub edges: EdgeSet,
    /// `h`, defined on the union of the quasiblocks of `A`.
    pub map: PlacementMap,
    /// The grid vertex `v` that `h` sends the origin to.
    pub centre: Vertex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TemplateKind {
    /// `A` contains the whole edge boundary of the window.
    Large,
    /// `A` avoids the edge boundary of the window.
    Small,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemplateInfo {
    pub kind: TemplateKind,
    pub k: u32,
    /// `δ = |A|`.
    pub delta: usize,
    /// Number of clusters.
    pub r1: usize,
    /// Number of quasiblocks minus `r1`.
    pub r2: usize,
    /// `|A ∩ Λ([-k, k]²)|`.
    pub interior_edges: usize,
    pub gamma: usize,
}

/// One lower bound on `γ(h)` and whether the template meets it.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaBound {
    pub name: &'static str,
    pub bound: f64,
    pub holds: bool,
}

impl TemplateInfo {
    /// The lower bounds on `γ(h)` that apply to this template's kind. For
    /// large templates the `δ/20` bound is only included when `k >= 4`.
    pub fn gamma_bounds(&self) -> Vec<GammaBound> {
        let g = self.gamma as f64;
        let (r1, r2, delta) = (self.r1 as f64, self.r2 as f64, self.delta as f64);
        let side = (2 * self.k + 1) as f64;
        let mut out = Vec::new();
        let mut push = |name, bound: f64| out.push(GammaBound { name, bound, holds: g >= bound });
        match self.kind {
            TemplateKind::Small => {
                push("delta/2", delta / 2.0);
                push("2r1+r2/2+1/2", 2.0 * r1 + r2 / 2.0 + 0.5);
            }
            TemplateKind::Large => {
                push("2r1+r2/2-2r1/(2k+1)", 2.0 * r1 + r2 / 2.0 - 2.0 * r1 / side);
                if self.k >= 4 {
                    push("delta/20", delta / 20.0);
                }
            }
        }
        out
    }

    /// The large-template bound with `r₂` in place of `r₂/2`. Reported for
    /// information only; it is not asserted anywhere.
    pub fn strong_large_bound_holds(&self) -> Option<bool> {
        (self.kind == TemplateKind::Large).then(|| {
            let side = (2 * self.k + 1) as f64;
            let r1 = self.r1 as f64;
            self.gamma as f64 >= 2.0 * r1 + self.r2 as f64 - 2.0 * r1 / side
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TemplateRejection {
    #[error("edge {0} is not incident to the window")]
    EdgeOutsideWindow(Edge),
    #[error("condition (1): no edge of A is incident to the origin")]
    NoEdgeAtOrigin,
    #[error("condition (2): A is exactly the four edges around {0}")]
    SingleVertexStar(Vertex),
    #[error("condition (3): A is not dual-connected")]
    NotDualConnected,
    #[error("the domain of h is not the union of the quasiblocks of A")]
    DomainMismatch,
    #[error("h sends {point} to {image}, outside the grid")]
    OutsideGrid { point: Vertex, image: Vertex },
    #[error("condition (4): h sends the origin to {found}, not {expected}")]
    CentreMismatch { expected: Vertex, found: Vertex },
    #[error("condition (5): A meets the window boundary without containing it")]
    PartialWindowBoundary,
    #[error("condition (6): a quasiblock containing {0} is not rigid")]
    QuasiblockNotRigid(Vertex),
    #[error("condition (7): interior edge {0} of A is not split by h")]
    EdgeNotSplit(Edge),
}

/// Quasiblocks of `A` in the window `[-k, k]²`: for every component of the
/// window graph with the edges of `A` deleted, the vertices of that
/// component incident to an edge of `A`. Empty quasiblocks are dropped.
/// Each entry also reports how many window-rim vertices its component holds.
fn quasiblocks(k: i32, a: &EdgeSet) -> Vec<(VertexSet, usize)> {
    let window = grid::square(-k, k);
    let on_rim = |v: &Vertex| v.x.abs() == k || v.y.abs() == k;
    grid::components(&window, a)
        .into_iter()
        .filter_map(|comp| {
            let rim = comp.iter().filter(|v| on_rim(v)).count();
            let q: VertexSet = comp
                .into_iter()
                .filter(|&v| grid::incident_edges(v).iter().any(|e| a.contains(e)))
                .collect();
            (!q.is_empty()).then_some((q, rim))
        })
        .collect()
}

pub fn validate_template(t: &Template, params: JigsawParams) -> Result<TemplateInfo, TemplateRejection> {
    let k = t.k as i32;
    let a = &t.edges;
    let window = grid::square(-k, k);
    let closure = grid::closed_edges(&window);
    if let Some(&e) = a.iter().find(|e| !closure.contains(e)) {
        return Err(TemplateRejection::EdgeOutsideWindow(e));
    }

    // (1)
    if !grid::incident_edges(Vertex::ORIGIN).iter().any(|e| a.contains(e)) {
        return Err(TemplateRejection::NoEdgeAtOrigin);
    }
    // (2)
    let star_centres = std::iter::once(Vertex::ORIGIN).chain(Vertex::ORIGIN.neighbours());
    for c in star_centres {
        let star: EdgeSet = grid::incident_edges(c).into_iter().collect();
        if *a == star {
            return Err(TemplateRejection::SingleVertexStar(c));
        }
    }
    // (3)
    if !grid::is_dual_connected(a) {
        return Err(TemplateRejection::NotDualConnected);
    }

    let blocks = quasiblocks(k, a);
    let union: VertexSet = blocks.iter().flat_map(|(q, _)| q.iter().copied()).collect();
    if t.map.domain() != union {
        return Err(TemplateRejection::DomainMismatch);
    }
    if let Some((point, image)) = t.map.iter().find(|(_, y)| !y.in_grid(params.n())) {
        return Err(TemplateRejection::OutsideGrid { point, image });
    }

    // (4)
    let found = t.map.get(Vertex::ORIGIN).expect("origin is in a quasiblock by (1)");
    if found != t.centre {
        return Err(TemplateRejection::CentreMismatch {
            expected: t.centre,
            found,
        });
    }
    // (5)
    let window_boundary = grid::edge_boundary(&window);
    let kind = if window_boundary.is_subset(a) {
        TemplateKind::Large
    } else if window_boundary.is_disjoint(a) {
        TemplateKind::Small
    } else {
        return Err(TemplateRejection::PartialWindowBoundary);
    };
    // (6)
    for (q, _) in &blocks {
        let first = *q.first().expect("quasiblocks are non-empty");
        let offset = t.map.get(first).unwrap() - first;
        if q.iter().any(|&x| t.map.get(x).unwrap() - x != offset) {
            return Err(TemplateRejection::QuasiblockNotRigid(first));
        }
    }
    // (7)
    let split = feasibility::split_edges(&t.map);
    let interior = grid::induced_edges(&window);
    let a_star: EdgeSet = a.intersection(&interior).copied().collect();
    if let Some(&e) = a_star.iter().find(|e| !split.contains(e)) {
        return Err(TemplateRejection::EdgeNotSplit(e));
    }

    let r1 = cluster_count(&t.map, &blocks, kind);
    Ok(TemplateInfo {
        kind,
        k: t.k,
        delta: a.len(),
        r1,
        r2: blocks.len() - r1,
        interior_edges: a_star.len(),
        gamma: feasibility::gamma(&t.map),
    })
}

/// Number of connected components of the cluster graph.
///
/// Two quasiblocks are adjacent when some lattice edge joins their images
/// and lies in the external boundary of both images. For small templates
/// the boundary quasiblock instead uses its internal boundary: it is
/// adjacent to a non-boundary quasiblock when a joining edge lies in its own
/// internal boundary and the other's external boundary. The boundary
/// quasiblock is the one whose component holds the most rim vertices.
fn cluster_count(h: &PlacementMap, blocks: &[(VertexSet, usize)], kind: TemplateKind) -> usize {
    let images: Vec<VertexSet> = blocks
        .iter()
        .map(|(q, _)| q.iter().map(|&x| h.get(x).unwrap()).collect())
        .collect();
    let mut owner: BTreeMap<Vertex, usize> = BTreeMap::new();
    for (i, img) in images.iter().enumerate() {
        for &y in img {
            owner.insert(y, i);
        }
    }
    let bounds: Vec<grid::Boundaries> = images.iter().map(grid::boundaries).collect();
    let boundary_block = match kind {
        TemplateKind::Large => None,
        TemplateKind::Small => blocks
            .iter()
            .enumerate()
            .filter(|(_, (_, rim))| *rim > 0)
            .max_by_key(|(i, (_, rim))| (*rim, std::cmp::Reverse(*i)))
            .map(|(i, _)| i),
    };

    let mut uf = UnionFind::new(blocks.len());
    for i in 0..blocks.len() {
        let own_side = if Some(i) == boundary_block {
            &bounds[i].internal
        } else {
            &bounds[i].external
        };
        for e in own_side {
            let (p, r) = e.endpoints();
            let other = if images[i].contains(&p) { r } else { p };
            let Some(&j) = owner.get(&other) else { continue };
            if j == i || Some(j) == boundary_block {
                continue;
            }
            if bounds[j].external.contains(e) {
                uf.union(i, j);
            }
        }
    }
    uf.count_sets()
}

/// Draws a random injective `f: [-k, k]² -> [n]²` and, if it yields one,
/// returns the template through a split edge at the origin.
///
/// The window is coloured into regions: a background plus one to five
/// random rectangles painted on top of each other. Each region is then
/// translated as a unit: by the background's offset, by a nearby offset, or
/// to a uniformly random spot. Placements that are not injective are
/// redrawn a bounded number of times.
pub fn sample_template(k: u32, params: JigsawParams, seed: u64) -> Option<Template> {
    let ki = k as i32;
    let side = 2 * ki + 1;
    let n = params.n() as i32;
    if n < side {
        return None;
    }
    let mut rng = rng_from(seed);
    let window = grid::square(-ki, ki);

    let regions = 1 + rng.gen_range(1..=5usize);
    let mut region_of: BTreeMap<Vertex, usize> = window.iter().map(|&v| (v, 0)).collect();
    for r in 1..regions {
        let w = rng.gen_range(1..=ki + 1);
        let h = rng.gen_range(1..=ki + 1);
        let (x0, y0) = if rng.gen_bool(0.5) {
            // Touch or cover the origin.
            (rng.gen_range(-w..=1), rng.gen_range(-h..=1))
        } else {
            (rng.gen_range(-ki..=ki), rng.gen_range(-ki..=ki))
        };
        for x in x0..x0 + w {
            for y in y0..y0 + h {
                if let Some(slot) = region_of.get_mut(&Vertex::new(x, y)) {
                    *slot = r;
                }
            }
        }
    }
    let mut members: Vec<VertexSet> = vec![VertexSet::new(); regions];
    for (&v, &r) in &region_of {
        members[r].insert(v);
    }

    let lo = 1 + ki;
    let hi = n - ki;
    let base = Vertex::new(rng.gen_range(lo..=hi), rng.gen_range(lo..=hi));
    let f = 'attempt: {
        for _ in 0..64 {
            let mut pairs = Vec::with_capacity(window.len());
            for (r, cells) in members.iter().enumerate() {
                if cells.is_empty() {
                    continue;
                }
                let offset = if r == 0 {
                    base
                } else {
                    let roll: f64 = rng.gen();
                    if roll < 0.2 {
                        base
                    } else if roll < 0.7 {
                        let reach = side + 2;
                        base + Vertex::new(rng.gen_range(-reach..=reach), rng.gen_range(-reach..=reach))
                    } else {
                        Vertex::new(rng.gen_range(1 - ki..=n + ki), rng.gen_range(1 - ki..=n + ki))
                    }
                };
                pairs.extend(cells.iter().map(|&x| (x, x + offset)));
            }
            if let Ok(f) = PlacementMap::new(pairs) {
                if f.check_in_grid(params.n()).is_ok() {
                    break 'attempt f;
                }
            }
        }
        return None;
    };

    let lambda = feasibility::lambda_f(&f);
    let split = feasibility::split_edges(&f);
    let at_origin: Vec<Edge> = grid::incident_edges(Vertex::ORIGIN)
        .into_iter()
        .filter(|e| split.contains(e))
        .collect();
    if at_origin.is_empty() {
        return None;
    }
    let seed_edge = at_origin[rng.gen_range(0..at_origin.len())];
    let a = grid::dual_component_of(&lambda, seed_edge)?;
    let touched: VertexSet = window
        .iter()
        .copied()
        .filter(|&v| grid::incident_edges(v).iter().any(|e| a.contains(e)))
        .collect();
    let t = Template {
        k,
        edges: a,
        map: f.restrict(&touched),
        centre: f.get(Vertex::ORIGIN).unwrap(),
    };
    validate_template(&t, params).ok().map(|_| t)
}
