//! Text encodings for jigsaws, decks and placement maps.
//!
//! Jigsaw file:
//!
//! ```text
//! JIGSAW n q
//! <one colour per line, 2n(n+1) lines, canonical edge order>
//! ```
//!
//! Canonical order lists horizontal edges `{(x,y),(x+1,y)}` for `y = 1..n`
//! (outer) and `x = 0..n` (inner), then vertical edges `{(x,y),(x,y+1)}`
//! for `y = 0..n` (outer) and `x = 1..n` (inner).
//!
//! Deck file:
//!
//! ```text
//! DECK n q
//! <n² lines "up right down left", sorted ascending as integer tuples>
//! ```
//!
//! Placement map file: one `x y -> x' y'` per line; blank lines and lines
//! starting with `#` are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use crate::feasibility::{MapError, PlacementMap};
use crate::grid::Vertex;
use crate::jigsaw::{Colour, Deck, DeckError, Jigsaw, JigsawError, JigsawParams, ParamsError, Tile};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("empty input")]
    Empty,
    #[error("line {line}: malformed header {found:?}, expected \"{expected} n q\"")]
    BadHeader {
        line: usize,
        expected: &'static str,
        found: String,
    },
    #[error("line {line}: {msg}")]
    BadLine { line: usize, msg: String },
    #[error("expected {expected} data lines, found {found}")]
    WrongLineCount { expected: usize, found: usize },
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Jigsaw(#[from] JigsawError),
    #[error(transparent)]
    Deck(#[from] DeckError),
    #[error(transparent)]
    Map(#[from] MapError),
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_header(line: Option<(usize, &str)>, expected: &'static str) -> Result<JigsawParams, FormatError> {
    let (no, line) = line.ok_or(FormatError::Empty)?;
    let bad = || FormatError::BadHeader {
        line: no,
        expected,
        found: line.to_string(),
    };
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 3 || parts[0] != expected {
        return Err(bad());
    }
    let n: u32 = parts[1].parse().map_err(|_| bad())?;
    let q: u32 = parts[2].parse().map_err(|_| bad())?;
    Ok(JigsawParams::new(n, q)?)
}

fn parse_colour(no: usize, s: &str) -> Result<Colour, FormatError> {
    s.parse().map_err(|_| FormatError::BadLine {
        line: no,
        msg: format!("not a colour: {s:?}"),
    })
}

pub fn encode_jigsaw(j: &Jigsaw) -> String {
    let mut out = format!("JIGSAW {} {}\n", j.params().n(), j.params().q());
    for c in j.colours() {
        writeln!(out, "{c}").unwrap();
    }
    out
}

pub fn decode_jigsaw(text: &str) -> Result<Jigsaw, FormatError> {
    let mut lines = data_lines(text);
    let params = parse_header(lines.next(), "JIGSAW")?;
    let mut colours = Vec::with_capacity(params.edge_count());
    for (no, line) in lines {
        colours.push(parse_colour(no, line)?);
    }
    if colours.len() != params.edge_count() {
        return Err(FormatError::WrongLineCount {
            expected: params.edge_count(),
            found: colours.len(),
        });
    }
    Ok(Jigsaw::from_colours(params, colours)?)
}

pub fn encode_deck(d: &Deck) -> String {
    let mut out = format!("DECK {} {}\n", d.params().n(), d.params().q());
    for t in d.sorted_tiles() {
        writeln!(out, "{t}").unwrap();
    }
    out
}

pub fn decode_deck(text: &str) -> Result<Deck, FormatError> {
    let mut lines = data_lines(text);
    let params = parse_header(lines.next(), "DECK")?;
    let mut tiles = Vec::with_capacity(params.tile_count());
    for (no, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(FormatError::BadLine {
                line: no,
                msg: format!("expected 4 colours, got {}", parts.len()),
            });
        }
        let mut c = [0; 4];
        for (slot, s) in c.iter_mut().zip(&parts) {
            *slot = parse_colour(no, s)?;
        }
        tiles.push(Tile(c));
    }
    if tiles.len() != params.tile_count() {
        return Err(FormatError::WrongLineCount {
            expected: params.tile_count(),
            found: tiles.len(),
        });
    }
    Ok(Deck::from_tiles(params, tiles)?)
}

pub fn encode_map(f: &PlacementMap) -> String {
    let mut out = String::new();
    for (x, y) in f.iter() {
        writeln!(out, "{} {} -> {} {}", x.x, x.y, y.x, y.y).unwrap();
    }
    out
}

pub fn decode_map(text: &str) -> Result<PlacementMap, FormatError> {
    let mut pairs = Vec::new();
    for (no, line) in data_lines(text) {
        if line.starts_with('#') {
            continue;
        }
        let bad = || FormatError::BadLine {
            line: no,
            msg: format!("expected \"x y -> x' y'\", got {line:?}"),
        };
        let (lhs, rhs) = line.split_once("->").ok_or_else(bad)?;
        let point = |s: &str| -> Option<Vertex> {
            let mut it = s.split_whitespace().map(|t| t.parse::<i32>());
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(x)), Some(Ok(y)), None) => Some(Vertex::new(x, y)),
                _ => None,
            }
        };
        let from = point(lhs).ok_or_else(bad)?;
        let to = point(rhs).ok_or_else(bad)?;
        pairs.push((from, to));
    }
    Ok(PlacementMap::new(pairs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn jigsaw_round_trip(n in 1u32..7, q in 2u32..50, seed in any::<u64>()) {
            let j = Jigsaw::generate(JigsawParams::new(n, q).unwrap(), seed);
            prop_assert_eq!(decode_jigsaw(&encode_jigsaw(&j)).unwrap(), j.clone());
            let d = j.deck();
            prop_assert_eq!(decode_deck(&encode_deck(&d)).unwrap(), d);
        }
    }

    #[test]
    fn deck_encoding_is_canonical() {
        let params = JigsawParams::new(2, 5).unwrap();
        let tiles = [Tile([4, 0, 0, 1]), Tile([0, 3, 2, 1]), Tile([0, 3, 2, 1]), Tile([1, 1, 1, 1])];
        let mut rev = tiles;
        rev.reverse();
        let a = encode_deck(&Deck::from_tiles(params, tiles).unwrap());
        let b = encode_deck(&Deck::from_tiles(params, rev).unwrap());
        assert_eq!(a, b);
        assert_eq!(a, "DECK 2 5\n0 3 2 1\n0 3 2 1\n1 1 1 1\n4 0 0 1\n");
    }

    #[test]
    fn truncated_and_malformed_inputs_are_errors() {
        let j = Jigsaw::generate(JigsawParams::new(3, 4).unwrap(), 1);
        let text = encode_jigsaw(&j);
        let cut: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
        assert!(matches!(decode_jigsaw(&cut), Err(FormatError::WrongLineCount { .. })));
        assert!(matches!(decode_jigsaw(""), Err(FormatError::Empty)));
        assert!(matches!(decode_jigsaw("JIGSAW 3\n"), Err(FormatError::BadHeader { .. })));
        assert!(matches!(decode_jigsaw("DECK 1 2\n0\n0\n0\n0\n"), Err(FormatError::BadHeader { .. })));
        assert!(matches!(decode_jigsaw("JIGSAW 1 2\n0\n1\n2\n0\n"), Err(FormatError::Jigsaw(_))));
        assert!(matches!(decode_jigsaw("JIGSAW 1 2\n0\nx\n1\n0\n"), Err(FormatError::BadLine { line: 3, .. })));
        assert!(matches!(decode_deck("DECK 1 2\n0 0 0\n"), Err(FormatError::BadLine { .. })));
        assert!(matches!(decode_deck("DECK 2 2\n0 0 0 0\n"), Err(FormatError::WrongLineCount { .. })));
        assert!(matches!(decode_jigsaw("JIGSAW 1 1\n"), Err(FormatError::Params(_))));
    }

    #[test]
    fn map_parsing() {
        let f = decode_map("# two far apart\n0 0 -> 5 5\n\n1 0 -> 9 9\n").unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.get(Vertex::new(1, 0)), Some(Vertex::new(9, 9)));
        assert_eq!(decode_map(&encode_map(&f)).unwrap(), f);
        assert!(matches!(decode_map("0 0 -> 1 1\n1 0 -> 1 1\n"), Err(FormatError::Map(_))));
        assert!(matches!(decode_map("0 0 > 1 1\n"), Err(FormatError::BadLine { .. })));
    }
}
