use super::{axis_bit, check_dim, edge_endpoints, edge_index, num_edges, Edge, Vertex};
use crate::error::{Error, Result};

/// An element `S_{π,f}` of the hyperoctahedral group acting by
/// `S(v)_i = v_{π(i)} ⊕ f(i)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Symmetry {
    dim: u32,
    /// `perm[i - 1] = π(i)`, 1-based coordinates.
    perm: Vec<u8>,
    /// Flip mask in vertex layout: bit `n - i` set iff `f(i) = 1`.
    flips: u32,
}

/// Which subset of the group is used to generate lex-leader constraints.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SymmetrySet {
    /// `π` a transposition, at most one flipped coordinate.
    #[default]
    TranspositionsWithFlip,
    /// As above, plus identity `π` with exactly one flipped coordinate.
    WithPureFlips,
}

impl Symmetry {
    pub fn identity(dim: u32) -> Self {
        Symmetry {
            dim,
            perm: (1..=dim as u8).collect(),
            flips: 0,
        }
    }

    /// `perm` lists `π(1), …, π(n)`; `flipped` lists the coordinates with `f = 1`.
    pub fn new(perm: &[u32], flipped: &[u32]) -> Result<Self> {
        let n = perm.len() as u32;
        check_dim(n)?;
        let mut seen = vec![false; n as usize + 1];
        for &p in perm {
            if p == 0 || p > n || std::mem::replace(&mut seen[p as usize], true) {
                return Err(Error::InvalidArgument(format!("not a permutation: {perm:?}")));
            }
        }
        let mut flips = 0;
        for &i in flipped {
            if i == 0 || i > n {
                return Err(Error::InvalidArgument(format!("flip coordinate {i} out of range")));
            }
            flips |= 1 << axis_bit(n, i);
        }
        Ok(Symmetry {
            dim: n,
            perm: perm.iter().map(|&p| p as u8).collect(),
            flips,
        })
    }

    pub fn transposition(dim: u32, i: u32, j: u32, flip: Option<u32>) -> Result<Self> {
        let mut perm: Vec<u32> = (1..=dim).collect();
        if i == 0 || j == 0 || i > dim || j > dim {
            return Err(Error::InvalidArgument(format!("bad transposition ({i} {j})")));
        }
        perm.swap(i as usize - 1, j as usize - 1);
        let flipped: Vec<u32> = flip.into_iter().collect();
        Symmetry::new(&perm, &flipped)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// `π(i)` for 1-based `i`.
    pub fn perm(&self, i: u32) -> u32 {
        self.perm[i as usize - 1] as u32
    }

    pub fn flipped(&self, i: u32) -> bool {
        self.flips >> axis_bit(self.dim, i) & 1 == 1
    }

    pub fn is_identity(&self) -> bool {
        self.flips == 0 && self.perm.iter().enumerate().all(|(i, &p)| p as usize == i + 1)
    }

    /// True iff the first coordinate of every vertex is preserved.
    pub fn fixes_first_coordinate(&self) -> bool {
        self.perm(1) == 1 && !self.flipped(1)
    }

    #[inline]
    pub fn apply_bits(&self, v: u32) -> u32 {
        let n = self.dim;
        let mut out = 0;
        for i in 1..=n {
            let src = axis_bit(n, self.perm(i));
            out |= ((v >> src) & 1) << axis_bit(n, i);
        }
        out ^ self.flips
    }

    pub fn apply_vertex(&self, v: Vertex) -> Result<Vertex> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch(v.dim(), self.dim));
        }
        Ok(Vertex::from_raw(self.apply_bits(v.bits()), self.dim))
    }

    pub fn apply_edge(&self, e: Edge) -> Result<Edge> {
        Edge::new(self.apply_vertex(e.lo())?, self.apply_vertex(e.hi())?)
    }

    /// Image of the edge with canonical index `e`.
    #[inline]
    pub fn apply_edge_index(&self, e: usize) -> usize {
        let (lo, bit) = edge_endpoints(self.dim, e);
        let a = self.apply_bits(lo);
        let b = self.apply_bits(lo | (1 << bit));
        edge_index(self.dim, a, (a ^ b).trailing_zeros())
    }

    /// `table[e]` is the index of `S(e)`.
    pub fn edge_permutation(&self) -> Vec<usize> {
        (0..num_edges(self.dim)).map(|e| self.apply_edge_index(e)).collect()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Symmetry) -> Symmetry {
        let n = self.dim;
        let perm = (1..=n).map(|i| other.perm(self.perm(i)) as u8).collect();
        let mut flips = self.flips;
        for i in 1..=n {
            if other.flipped(self.perm(i)) {
                flips ^= 1 << axis_bit(n, i);
            }
        }
        Symmetry { dim: n, perm, flips }
    }

    pub fn inverse(&self) -> Symmetry {
        let n = self.dim;
        let mut inv = vec![0u8; n as usize];
        for i in 1..=n {
            inv[self.perm(i) as usize - 1] = i as u8;
        }
        let mut flips = 0;
        for j in 1..=n {
            let pre = inv[j as usize - 1] as u32;
            if self.flipped(pre) {
                flips |= 1 << axis_bit(n, j);
            }
        }
        Symmetry {
            dim: n,
            perm: inv,
            flips,
        }
    }

    /// Every element of the group, `n!·2^n` of them.
    pub fn all(dim: u32) -> Vec<Symmetry> {
        let mut perms = Vec::new();
        let mut current: Vec<u32> = (1..=dim).collect();
        permutations(&mut current, 0, &mut perms);
        let mut out = Vec::with_capacity(perms.len() << dim);
        for p in &perms {
            for mask in 0..1u32 << dim {
                let flipped: Vec<u32> = (1..=dim).filter(|&i| mask >> (i - 1) & 1 == 1).collect();
                out.push(Symmetry::new(p, &flipped).expect("valid permutation"));
            }
        }
        out
    }
}

fn permutations(v: &mut Vec<u32>, k: usize, out: &mut Vec<Vec<u32>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}

/// Symmetries used for lex-leader generation, in a fixed order:
/// transpositions `(i j)` with `i < j` lexicographically, each first without
/// a flip and then with a flip on coordinate `1, …, n`.
pub fn generating_symmetries(n: u32, set: SymmetrySet) -> Vec<Symmetry> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            out.push(Symmetry::transposition(n, i, j, None).expect("valid"));
            for f in 1..=n {
                out.push(Symmetry::transposition(n, i, j, Some(f)).expect("valid"));
            }
        }
    }
    if set == SymmetrySet::WithPureFlips {
        let id: Vec<u32> = (1..=n).collect();
        for f in 1..=n {
            out.push(Symmetry::new(&id, &[f]).expect("valid"));
        }
    }
    out
}
