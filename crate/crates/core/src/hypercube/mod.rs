//! Exact model of the hypercube `Q_n`.
//!
//! Vertices are bit-vectors where coordinate 1 is the most significant bit,
//! so lexicographic order on coordinate sequences is plain numeric order on
//! the underlying integer. Edges are identified by a canonical index laid
//! out axis-major: all edges flipping coordinate 1 first, then coordinate 2,
//! and so on; within one axis by the lower endpoint with that bit removed.

mod coloring;
mod subcube;
mod symmetry;

use std::fmt;

pub use coloring::{Color, Coloring};
pub use subcube::{sub_hypercubes, SubCube, SubCubes};
pub use symmetry::{generating_symmetries, Symmetry, SymmetrySet};

use crate::error::{Error, Result};

pub const MAX_DIM: u32 = 30;

pub(crate) fn check_dim(n: u32) -> Result<()> {
    if (1..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::Dimension(n))
    }
}

/// Bit position holding coordinate `axis` (1-based) in dimension `n`.
#[inline]
pub fn axis_bit(n: u32, axis: u32) -> u32 {
    debug_assert!(axis >= 1 && axis <= n);
    n - axis
}

#[inline]
pub fn axis_of_bit(n: u32, bit: u32) -> u32 {
    n - bit
}

#[inline]
pub fn num_vertices(n: u32) -> usize {
    1usize << n
}

#[inline]
pub fn num_edges(n: u32) -> usize {
    (n as usize) << (n - 1)
}

#[inline]
pub fn full_mask(n: u32) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Canonical index of the edge at `v` along bit position `bit`.
///
/// `v` may be either endpoint.
#[inline]
pub fn edge_index(n: u32, v: u32, bit: u32) -> usize {
    let lo = v & !(1 << bit);
    let compressed = ((lo >> (bit + 1)) << bit) | (lo & ((1 << bit) - 1));
    let axis = axis_of_bit(n, bit) as usize;
    ((axis - 1) << (n - 1)) | compressed as usize
}

/// Inverse of [`edge_index`]: returns `(lo, bit)`.
#[inline]
pub fn edge_endpoints(n: u32, index: usize) -> (u32, u32) {
    let axis = (index >> (n - 1)) as u32 + 1;
    let bit = axis_bit(n, axis);
    let c = (index & ((1usize << (n - 1)) - 1)) as u32;
    let lo = ((c >> bit) << (bit + 1)) | (c & ((1 << bit) - 1));
    (lo, bit)
}

/// Index of the antipodal edge `{ū, v̄}`.
#[inline]
pub fn antipodal_edge_index(n: u32, index: usize) -> usize {
    let (lo, bit) = edge_endpoints(n, index);
    edge_index(n, !lo & full_mask(n), bit)
}

#[inline]
pub fn hamming(u: u32, v: u32) -> u32 {
    (u ^ v).count_ones()
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    bits: u32,
    dim: u8,
}

impl Vertex {
    pub fn new(bits: u32, dim: u32) -> Result<Self> {
        check_dim(dim)?;
        if bits > full_mask(dim) {
            return Err(Error::VertexOutOfRange { bits, dim });
        }
        Ok(Vertex {
            bits,
            dim: dim as u8,
        })
    }

    /// Parses a coordinate string such as `"1011"` (coordinate 1 first).
    pub fn parse(s: &str) -> Result<Self> {
        let dim = s.len() as u32;
        check_dim(dim)?;
        let bits = u32::from_str_radix(s, 2)
            .map_err(|_| Error::InvalidArgument(format!("not a bit string: {s:?}")))?;
        Vertex::new(bits, dim)
    }

    pub(crate) fn from_raw(bits: u32, dim: u32) -> Self {
        Vertex {
            bits,
            dim: dim as u8,
        }
    }

    pub fn zero(dim: u32) -> Result<Self> {
        Vertex::new(0, dim)
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn dim(self) -> u32 {
        self.dim as u32
    }

    /// Coordinate `i` (1-based) as 0 or 1.
    pub fn coord(self, i: u32) -> u32 {
        (self.bits >> axis_bit(self.dim(), i)) & 1
    }

    pub fn antipodal(self) -> Vertex {
        Vertex {
            bits: !self.bits & full_mask(self.dim()),
            dim: self.dim,
        }
    }

    pub fn distance(self, other: Vertex) -> Result<u32> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(hamming(self.bits, other.bits))
    }

    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    /// The neighbor across coordinate `axis` (1-based).
    pub fn flip(self, axis: u32) -> Vertex {
        Vertex {
            bits: self.bits ^ (1 << axis_bit(self.dim(), axis)),
            dim: self.dim,
        }
    }

    pub fn neighbors(self) -> impl Iterator<Item = Vertex> {
        (1..=self.dim()).map(move |a| self.flip(a))
    }

    /// `self ≺_lex antipodal(self)`, i.e. the first coordinate is 0.
    pub fn is_lex_smaller_half(self) -> bool {
        self.bits < self.antipodal().bits
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.dim as usize)
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vertex({self})")
    }
}

/// An undirected edge with `lo ≺_lex hi`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    lo: Vertex,
    hi: Vertex,
    axis: u8,
}

impl Edge {
    pub fn new(u: Vertex, v: Vertex) -> Result<Self> {
        if u.distance(v)? != 1 {
            return Err(Error::NotAdjacent(u.to_string(), v.to_string()));
        }
        let (lo, hi) = if u < v { (u, v) } else { (v, u) };
        let bit = (lo.bits ^ hi.bits).trailing_zeros();
        Ok(Edge {
            lo,
            hi,
            axis: axis_of_bit(lo.dim(), bit) as u8,
        })
    }

    pub fn from_index(n: u32, index: usize) -> Result<Self> {
        check_dim(n)?;
        if index >= num_edges(n) {
            return Err(Error::InvalidArgument(format!(
                "edge index {index} out of range for n = {n}"
            )));
        }
        let (lo, bit) = edge_endpoints(n, index);
        Ok(Edge {
            lo: Vertex::from_raw(lo, n),
            hi: Vertex::from_raw(lo | (1 << bit), n),
            axis: axis_of_bit(n, bit) as u8,
        })
    }

    pub fn lo(self) -> Vertex {
        self.lo
    }

    pub fn hi(self) -> Vertex {
        self.hi
    }

    pub fn axis(self) -> u32 {
        self.axis as u32
    }

    pub fn dim(self) -> u32 {
        self.lo.dim()
    }

    pub fn index(self) -> usize {
        edge_index(self.dim(), self.lo.bits, axis_bit(self.dim(), self.axis()))
    }

    pub fn antipodal(self) -> Edge {
        let (a, b) = (self.hi.antipodal(), self.lo.antipodal());
        Edge {
            lo: a,
            hi: b,
            axis: self.axis,
        }
    }

    pub fn contains(self, v: Vertex) -> bool {
        self.lo == v || self.hi == v
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Edge{self}")
    }
}

/// A fixed ordering `e_1, …, e_m` of all edges, stored as canonical indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeOrdering {
    dim: u32,
    sequence: Vec<usize>,
}

impl EdgeOrdering {
    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.sequence
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.sequence
            .iter()
            .map(move |&i| Edge::from_index(self.dim, i).expect("valid index"))
    }
}

/// Vertices visited in lexicographic order starting at `0⃗`; each vertex
/// contributes its not-yet-listed incident edges in ascending axis order.
pub fn canonical_edge_ordering(n: u32) -> Result<EdgeOrdering> {
    check_dim(n)?;
    let m = num_edges(n);
    let mut seen = vec![false; m];
    let mut sequence = Vec::with_capacity(m);
    for v in 0..num_vertices(n) as u32 {
        for axis in 1..=n {
            let e = edge_index(n, v, axis_bit(n, axis));
            if !seen[e] {
                seen[e] = true;
                sequence.push(e);
            }
        }
    }
    Ok(EdgeOrdering { dim: n, sequence })
}
