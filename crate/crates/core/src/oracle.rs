//! Ground truth for small instances: every jigsaw with a given deck, the
//! exact fraction of reconstructible jigsaws, the counting upper bound on
//! that fraction, and domino swaps that witness non-reconstructibility.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::grid::{Axis, Direction, Edge, Vertex};
use crate::jigsaw::{Colour, Deck, Jigsaw, JigsawParams, Tile};

/// Largest grid side enumerated without `force`.
pub const PREIMAGE_GUARD_N: u32 = 3;
/// Largest number of jigsaws enumerated without `force`.
pub const FRACTION_GUARD: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GuardError {
    #[error("enumeration refused for n = {n} above the guard n <= {PREIMAGE_GUARD_N}; pass force to override")]
    TooManyPositions { n: u32 },
    #[error("enumeration refused: q^(2n(n+1)) = {count} jigsaws exceeds {FRACTION_GUARD}; pass force to override")]
    TooManyJigsaws { count: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreimageResult {
    pub preimages: Vec<Jigsaw>,
    pub truncated: bool,
}

/// Jigsaws with exactly this deck, at most `cap` of them. `truncated` is
/// set when at least one more exists.
pub fn deck_preimages(deck: &Deck, cap: usize, force: bool) -> Result<PreimageResult, GuardError> {
    let n = deck.params().n();
    if n > PREIMAGE_GUARD_N && !force {
        return Err(GuardError::TooManyPositions { n });
    }
    let kinds: Vec<Tile> = deck.counts().keys().copied().collect();
    let mut counts: Vec<u32> = deck.counts().values().copied().collect();
    let mut placed: Vec<usize> = Vec::with_capacity(deck.total());
    let mut seen = HashSet::new();
    let mut out = PreimageResult {
        preimages: Vec::new(),
        truncated: false,
    };
    place_row_major(deck.params(), &kinds, &mut counts, &mut placed, cap, &mut seen, &mut out);
    Ok(out)
}

fn place_row_major(
    params: JigsawParams,
    kinds: &[Tile],
    counts: &mut [u32],
    placed: &mut Vec<usize>,
    cap: usize,
    seen: &mut HashSet<Jigsaw>,
    out: &mut PreimageResult,
) {
    if out.truncated {
        return;
    }
    let n = params.n() as usize;
    let p = placed.len();
    if p == n * n {
        let j = jigsaw_from_rows(params, placed.iter().map(|&i| kinds[i]));
        if seen.insert(j.clone()) {
            if out.preimages.len() == cap {
                out.truncated = true;
            } else {
                out.preimages.push(j);
            }
        }
        return;
    }
    let (x, y) = (p % n, p / n);
    let left = (x > 0).then(|| kinds[placed[p - 1]]);
    let below = (y > 0).then(|| kinds[placed[p - n]]);
    for i in 0..kinds.len() {
        if counts[i] == 0 {
            continue;
        }
        let t = &kinds[i];
        if left.is_some_and(|l| !l.fits(Direction::Right, t)) || below.is_some_and(|b| !b.fits(Direction::Up, t)) {
            continue;
        }
        counts[i] -= 1;
        placed.push(i);
        place_row_major(params, kinds, counts, placed, cap, seen, out);
        placed.pop();
        counts[i] += 1;
    }
}

/// The jigsaw whose tiles, row-major from `(1,1)`, are `tiles`. Adjacent
/// tiles must agree on their shared edges.
fn jigsaw_from_rows(params: JigsawParams, tiles: impl Iterator<Item = Tile>) -> Jigsaw {
    let n = params.n() as i32;
    let mut j = Jigsaw::constant(params, 0).expect("colour 0 is valid");
    for (i, t) in tiles.enumerate() {
        let v = Vertex::new(i as i32 % n + 1, i as i32 / n + 1);
        for d in Direction::ALL {
            j.set_colour(Edge::from_dir(v, d), t.side(d)).expect("deck colours are in range");
        }
    }
    j
}

/// A non-negative fraction `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub num: u128,
    pub den: u128,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ratio {
    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn reduced(self) -> Ratio {
        let g = gcd(self.num, self.den).max(1);
        Ratio {
            num: self.num / g,
            den: self.den / g,
        }
    }

    pub fn le(self, other: Ratio) -> bool {
        self.num * other.den <= other.num * self.den
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// `q^(2n(n+1))`, if it fits.
fn jigsaw_count(params: JigsawParams) -> Option<u128> {
    (params.q() as u128).checked_pow(params.edge_count() as u32)
}

/// Exact fraction of `(n, q)`-jigsaws that are the only jigsaw with their
/// deck, by enumerating all `q^(2n(n+1))` of them.
pub fn exact_recon_fraction(params: JigsawParams, force: bool) -> Result<Ratio, GuardError> {
    let total = jigsaw_count(params).filter(|&c| c <= u64::MAX as u128);
    let total = match total {
        Some(t) if force || t <= FRACTION_GUARD as u128 => t as u64,
        _ => {
            let count = total.map_or_else(
                || format!("{}^{}", params.q(), params.edge_count()),
                |t| t.to_string(),
            );
            return Err(GuardError::TooManyJigsaws { count });
        }
    };
    let q = params.q() as u64;
    let m = params.edge_count();
    let decode = |mut code: u64| {
        let mut colours = vec![0 as Colour; m];
        for c in colours.iter_mut() {
            *c = (code % q) as Colour;
            code /= q;
        }
        Jigsaw::from_colours(params, colours).expect("colours are in range")
    };
    let classes = (0..total)
        .into_par_iter()
        .fold(HashMap::<Vec<Tile>, u64>::new, |mut acc, code| {
            *acc.entry(decode(code).deck().sorted_tiles()).or_insert(0) += 1;
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    let unique = classes.values().filter(|&&c| c == 1).count() as u128;
    Ok(Ratio {
        num: unique,
        den: total as u128,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundValue {
    /// `log₂` of the bound, clamped to at most 0.
    pub log2: f64,
    /// `binom(n²+q⁴−1, n²) / q^(2n(n+1))`, when evaluated exactly.
    pub exact: Option<Ratio>,
    /// Whether the unclamped bound exceeded 1.
    pub clamped: bool,
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `ln binom(big, small)`, switching to a direct sum when `big` dwarfs
/// `small` and the log-gamma difference would lose its digits.
fn ln_binomial(big: f64, small: f64) -> f64 {
    if big > small * 1e6 {
        (1..=small as u64)
            .map(|i| ((big - small + i as f64) / i as f64).ln())
            .sum()
    } else {
        ln_gamma(big + 1.0) - ln_gamma(small + 1.0) - ln_gamma(big - small + 1.0)
    }
}

/// Upper bound on the probability that a random `(n, q)`-jigsaw is
/// reconstructible: the number of possible decks over the number of
/// jigsaws. Exact for `n <= 2` and `q <= 4`.
pub fn zero_statement_bound(params: JigsawParams) -> BoundValue {
    let (n, q) = (params.n() as u128, params.q() as u128);
    let k = n * n;
    if n <= 2 && q <= 4 {
        let r = Ratio {
            num: binomial(k + q.pow(4) - 1, k),
            den: q.pow(params.edge_count() as u32),
        };
        let raw = (r.num as f64).log2() - (r.den as f64).log2();
        return BoundValue {
            log2: raw.min(0.0),
            exact: Some(r),
            clamped: !r.le(Ratio { num: 1, den: 1 }),
        };
    }
    let k = k as f64;
    let big = k + (q as f64).powi(4) - 1.0;
    let raw = ln_binomial(big, k) / std::f64::consts::LN_2 - params.edge_count() as f64 * (q as f64).log2();
    BoundValue {
        log2: raw.min(0.0),
        exact: None,
        clamped: raw > 0.0,
    }
}

/// Two disjoint dominoes of the same orientation whose tiles can be
/// exchanged. A horizontal domino at `u` is `{u, u+e₂}`, a vertical one
/// is `{u, u+e₁}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SwapCertificate {
    pub axis: Axis,
    pub u: Vertex,
    pub v: Vertex,
}

impl fmt::Display for SwapCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.axis {
            Axis::Horizontal => 'H',
            Axis::Vertical => 'V',
        };
        write!(f, "{tag} {} {} {} {}", self.u.x, self.u.y, self.v.x, self.v.y)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("domino at {0} leaves the grid")]
    OutsideGrid(Vertex),
    #[error("dominoes at {0} and {1} overlap")]
    Overlapping(Vertex, Vertex),
    #[error("outer edge {index} differs: {left} at the first domino, {right} at the second")]
    ProfileMismatch { index: usize, left: Colour, right: Colour },
    #[error("interior edges have the same colour, so the swap changes nothing")]
    SameInterior,
}

fn along(axis: Axis) -> Direction {
    match axis {
        Axis::Horizontal => Direction::Right,
        Axis::Vertical => Direction::Up,
    }
}

/// The six outer edges of the domino at `u`: the three outer sides of `u`
/// followed by the three outer sides of its partner, in direction order.
fn outer_edges(axis: Axis, u: Vertex) -> [Edge; 6] {
    let a = along(axis);
    let w = u.step(a);
    let mut out = [Edge::from_dir(u, a); 6];
    let sides_u = Direction::ALL.into_iter().filter(|&d| d != a).map(|d| Edge::from_dir(u, d));
    let sides_w = Direction::ALL
        .into_iter()
        .filter(|&d| d != a.opposite())
        .map(|d| Edge::from_dir(w, d));
    for (slot, e) in out.iter_mut().zip(sides_u.chain(sides_w)) {
        *slot = e;
    }
    out
}

fn inner_edge(axis: Axis, u: Vertex) -> Edge {
    Edge::from_dir(u, along(axis))
}

fn profile(j: &Jigsaw, axis: Axis, u: Vertex) -> [Colour; 6] {
    outer_edges(axis, u).map(|e| j.colour(e).expect("domino inside the grid"))
}

/// All swap certificates of `j`, sorted. Dominoes are grouped by their
/// outer colours, and any two disjoint ones in a group with different
/// interior colours form a certificate.
pub fn find_swap_certificates(j: &Jigsaw) -> Vec<SwapCertificate> {
    let n = j.n() as i32;
    let mut buckets: HashMap<(Axis, [Colour; 6]), Vec<Vertex>> = HashMap::new();
    for axis in [Axis::Horizontal, Axis::Vertical] {
        let a = along(axis);
        for y in 1..=n {
            for x in 1..=n {
                let u = Vertex::new(x, y);
                if u.step(a).in_grid(j.n()) {
                    buckets.entry((axis, profile(j, axis, u))).or_default().push(u);
                }
            }
        }
    }
    let mut out: Vec<SwapCertificate> = buckets
        .into_par_iter()
        .flat_map_iter(|((axis, _), members)| {
            let mut found = Vec::new();
            for (i, &u) in members.iter().enumerate() {
                for &v in &members[i + 1..] {
                    let (u, v) = (u.min(v), u.max(v));
                    let cert = SwapCertificate { axis, u, v };
                    if check(j, cert).is_ok() {
                        found.push(cert);
                    }
                }
            }
            found
        })
        .collect();
    out.sort();
    out
}

fn check(j: &Jigsaw, cert: SwapCertificate) -> Result<(), CertificateError> {
    let a = along(cert.axis);
    for p in [cert.u, cert.v] {
        if !p.in_grid(j.n()) || !p.step(a).in_grid(j.n()) {
            return Err(CertificateError::OutsideGrid(p));
        }
    }
    let cells_u = [cert.u, cert.u.step(a)];
    if cells_u.contains(&cert.v) || cells_u.contains(&cert.v.step(a)) {
        return Err(CertificateError::Overlapping(cert.u, cert.v));
    }
    let (pu, pv) = (profile(j, cert.axis, cert.u), profile(j, cert.axis, cert.v));
    if let Some(index) = (0..6).find(|&i| pu[i] != pv[i]) {
        return Err(CertificateError::ProfileMismatch {
            index,
            left: pu[index],
            right: pv[index],
        });
    }
    if j.colour(inner_edge(cert.axis, cert.u)) == j.colour(inner_edge(cert.axis, cert.v)) {
        return Err(CertificateError::SameInterior);
    }
    Ok(())
}

/// Exchanges the two dominoes' tiles, which swaps their interior edge
/// colours. The result differs from `j` and has the same deck.
pub fn apply_certificate(j: &Jigsaw, cert: SwapCertificate) -> Result<Jigsaw, CertificateError> {
    check(j, cert)?;
    let (eu, ev) = (inner_edge(cert.axis, cert.u), inner_edge(cert.axis, cert.v));
    let (cu, cv) = (j.colour(eu).unwrap(), j.colour(ev).unwrap());
    let mut out = j.clone();
    out.set_colour(eu, cv).expect("colour from the same jigsaw");
    out.set_colour(ev, cu).expect("colour from the same jigsaw");
    assert!(out != *j && out.deck() == j.deck());
    Ok(out)
}
