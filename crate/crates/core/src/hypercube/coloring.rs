use std::fmt::Write as _;
use std::str::FromStr;

use rand::Rng;

use super::{antipodal_edge_index, check_dim, edge_index, num_edges, Edge, Symmetry, Vertex};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn from_bit(red: bool) -> Color {
        if red {
            Color::Red
        } else {
            Color::Blue
        }
    }

    pub fn is_red(self) -> bool {
        self == Color::Red
    }

    pub fn flip(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }

    /// 0 for red, 1 for blue; used to index per-color tables.
    pub fn index(self) -> usize {
        match self {
            Color::Red => 0,
            Color::Blue => 1,
        }
    }

    fn to_char(self) -> char {
        match self {
            Color::Red => 'r',
            Color::Blue => 'b',
        }
    }
}

/// A total 2-coloring of `E(Q_n)`, stored as a bitset over canonical edge
/// indices (bit set = red).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    dim: u32,
    words: Vec<u64>,
}

const HEADER: &str = "qn-coloring v1 dim=";

impl Coloring {
    pub fn uniform(dim: u32, color: Color) -> Result<Self> {
        check_dim(dim)?;
        let m = num_edges(dim);
        let mut c = Coloring {
            dim,
            words: vec![0; m.div_ceil(64)],
        };
        if color.is_red() {
            for e in 0..m {
                c.set(e, Color::Red);
            }
        }
        Ok(c)
    }

    pub fn from_fn(dim: u32, mut f: impl FnMut(usize) -> Color) -> Result<Self> {
        let mut c = Coloring::uniform(dim, Color::Blue)?;
        for e in 0..num_edges(dim) {
            c.set(e, f(e));
        }
        Ok(c)
    }

    /// Coloring whose red edges are the set bits of `index` (edge `e` ↔ bit `e`).
    /// Used by exhaustive sweeps; requires `n·2^{n−1} ≤ 64`.
    pub fn from_index(dim: u32, index: u64) -> Result<Self> {
        check_dim(dim)?;
        if num_edges(dim) > 64 {
            return Err(Error::InvalidArgument(format!(
                "coloring index needs at most 64 edges, n = {dim} has {}",
                num_edges(dim)
            )));
        }
        Ok(Coloring {
            dim,
            words: vec![index],
        })
    }

    pub fn random<R: Rng + ?Sized>(dim: u32, rng: &mut R) -> Result<Self> {
        Coloring::from_fn(dim, |_| Color::from_bit(rng.gen()))
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn num_edges(&self) -> usize {
        num_edges(self.dim)
    }

    #[inline]
    pub fn color(&self, edge: usize) -> Color {
        Color::from_bit(self.is_red(edge))
    }

    #[inline]
    pub fn is_red(&self, edge: usize) -> bool {
        (self.words[edge / 64] >> (edge % 64)) & 1 == 1
    }

    /// Color of the edge between adjacent raw vertices `u` and `v`.
    #[inline]
    pub fn between(&self, u: u32, v: u32) -> Color {
        let bit = (u ^ v).trailing_zeros();
        self.color(edge_index(self.dim, u, bit))
    }

    pub fn edge_color(&self, e: Edge) -> Color {
        self.color(e.index())
    }

    pub fn set(&mut self, edge: usize, color: Color) {
        let (w, b) = (edge / 64, edge % 64);
        if color.is_red() {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    /// Red degree of a vertex.
    pub fn red_degree(&self, v: Vertex) -> u32 {
        (0..self.dim)
            .filter(|&bit| self.is_red(edge_index(self.dim, v.bits(), bit)))
            .count() as u32
    }

    /// True iff every edge and its antipodal edge receive different colors.
    pub fn is_antipodal(&self) -> bool {
        (0..self.num_edges()).all(|e| self.is_red(e) != self.is_red(antipodal_edge_index(self.dim, e)))
    }

    /// The coloring `e ↦ c(S(e))`.
    pub fn pull_back(&self, s: &Symmetry) -> Result<Coloring> {
        if s.dim() != self.dim {
            return Err(Error::DimensionMismatch(s.dim(), self.dim));
        }
        let table = s.edge_permutation();
        Coloring::from_fn(self.dim, |e| self.color(table[e]))
    }

    pub fn red_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_edges()).filter(|&e| self.is_red(e))
    }

    /// Text form: header line then one `r`/`b` line per edge in canonical
    /// index order.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.num_edges() * 2 + 32);
        writeln!(out, "{HEADER}{}", self.dim).unwrap();
        for e in 0..self.num_edges() {
            out.push(self.color(e).to_char());
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Coloring> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (lineno, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
        let dim: u32 = header
            .strip_prefix(HEADER)
            .and_then(|d| d.trim().parse().ok())
            .ok_or_else(|| Error::parse(lineno, format!("bad header {header:?}")))?;
        let mut c = Coloring::uniform(dim, Color::Blue)?;
        let mut count = 0;
        for (lineno, line) in lines {
            if count >= c.num_edges() {
                return Err(Error::parse(lineno, "more lines than edges"));
            }
            let color = match line {
                "r" => Color::Red,
                "b" => Color::Blue,
                other => return Err(Error::parse(lineno, format!("expected r or b, got {other:?}"))),
            };
            c.set(count, color);
            count += 1;
        }
        if count != c.num_edges() {
            return Err(Error::parse(
                count + 1,
                format!("expected {} edge lines, got {count}", c.num_edges()),
            ));
        }
        Ok(c)
    }
}

impl FromStr for Coloring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Coloring::parse_text(s)
    }
}

impl std::fmt::Debug for Coloring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: String = (0..self.num_edges()).map(|e| self.color(e).to_char()).collect();
        write!(f, "Coloring(n={}, {s})", self.dim)
    }
}
