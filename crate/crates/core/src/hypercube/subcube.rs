use super::{axis_of_bit, check_dim, full_mask, Vertex};
use crate::error::{Error, Result};

/// A `k`-dimensional sub-hypercube of `Q_n`: the vertices agreeing with
/// `base` outside the free axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SubCube {
    dim: u32,
    /// Zero on every free axis.
    base: u32,
    /// Free axes as a bit mask in vertex layout.
    free: u32,
}

impl SubCube {
    /// The unique sub-hypercube spanned by two vertices; its dimension is
    /// their distance.
    pub fn from_endpoints(u: Vertex, v: Vertex) -> Result<Self> {
        u.distance(v)?;
        let free = u.bits() ^ v.bits();
        Ok(SubCube {
            dim: u.dim(),
            base: u.bits() & !free,
            free,
        })
    }

    pub fn ambient_dim(&self) -> u32 {
        self.dim
    }

    pub fn k(&self) -> u32 {
        self.free.count_ones()
    }

    pub fn base(&self) -> Vertex {
        Vertex::from_raw(self.base, self.dim)
    }

    pub fn free_mask(&self) -> u32 {
        self.free
    }

    /// Free axes (1-based), ascending.
    pub fn axes(&self) -> Vec<u32> {
        let mut axes: Vec<u32> = (0..self.dim)
            .filter(|b| self.free >> b & 1 == 1)
            .map(|b| axis_of_bit(self.dim, b))
            .collect();
        axes.sort_unstable();
        axes
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v.dim() == self.dim && v.bits() & !self.free == self.base
    }

    /// Embeds a vertex of `Q_k` (local coordinate `j` ↦ the `j`-th free axis).
    pub fn embed_bits(&self, local: u32) -> u32 {
        let k = self.k();
        let mut out = self.base;
        let mut free = self.free;
        // walk free bits from most significant (smallest axis) down
        let mut j = 0;
        while free != 0 {
            let bit = 31 - free.leading_zeros();
            free &= !(1 << bit);
            if local >> (k - 1 - j) & 1 == 1 {
                out |= 1 << bit;
            }
            j += 1;
        }
        out
    }

    pub fn embed(&self, local: Vertex) -> Result<Vertex> {
        if local.dim() != self.k() {
            return Err(Error::DimensionMismatch(local.dim(), self.k()));
        }
        Ok(Vertex::from_raw(self.embed_bits(local.bits()), self.dim))
    }

    /// Inverse of [`SubCube::embed_bits`] for vertices inside the subcube.
    pub fn project_bits(&self, v: u32) -> u32 {
        let mut out = 0;
        let mut free = self.free;
        while free != 0 {
            let bit = 31 - free.leading_zeros();
            free &= !(1 << bit);
            out = (out << 1) | (v >> bit & 1);
        }
        out
    }
}

/// Iterator over all `2^{n−k}·C(n,k)` sub-hypercubes of dimension `k`.
pub struct SubCubes {
    n: u32,
    k: u32,
    free: u32,
    base: u32,
    done: bool,
}

impl Iterator for SubCubes {
    type Item = SubCube;

    fn next(&mut self) -> Option<SubCube> {
        if self.done {
            return None;
        }
        let item = SubCube {
            dim: self.n,
            base: self.base,
            free: self.free,
        };
        // next base: enumerate submasks of the complement in increasing order
        let comp = full_mask(self.n) & !self.free;
        let next_base = (self.base.wrapping_sub(comp)) & comp;
        if next_base != 0 {
            self.base = next_base;
        } else {
            // Gosper's hack: next mask with the same popcount
            let x = self.free;
            if x == 0 {
                self.done = true;
                return Some(item);
            }
            let c = x & x.wrapping_neg();
            let r = x + c;
            let next = (((r ^ x) >> 2) / c) | r;
            if next > full_mask(self.n) || r == 0 {
                self.done = true;
            } else {
                self.free = next;
                self.base = 0;
            }
        }
        Some(item)
    }
}

pub fn sub_hypercubes(n: u32, k: u32) -> Result<SubCubes> {
    check_dim(n)?;
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    Ok(SubCubes {
        n,
        k,
        free: if k == 0 { 0 } else { full_mask(k) },
        base: 0,
        done: false,
    })
}

impl SubCubes {
    pub fn k(&self) -> u32 {
        self.k
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn binom(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn counts() {
        assert_eq!(sub_hypercubes(4, 3).unwrap().count(), 8);
        assert_eq!(sub_hypercubes(5, 5).unwrap().count(), 1);
        assert_eq!(sub_hypercubes(6, 3).unwrap().count(), 160);
        for n in 2..=7 {
            for k in 2..=n {
                let all: Vec<_> = sub_hypercubes(n, k).unwrap().collect();
                assert_eq!(all.len() as u64, (1 << (n - k)) * binom(n as u64, k as u64));
                let unique: HashSet<_> = all.iter().collect();
                assert_eq!(unique.len(), all.len());
                assert!(all.iter().all(|s| s.k() == k && s.base & s.free == 0));
            }
        }
    }

    #[test]
    fn embedding_round_trip() {
        for s in sub_hypercubes(6, 3).unwrap() {
            let mut seen = HashSet::new();
            for local in 0..8 {
                let v = s.embed_bits(local);
                assert!(s.contains(Vertex::from_raw(v, 6)));
                assert_eq!(s.project_bits(v), local);
                seen.insert(v);
            }
            assert_eq!(seen.len(), 8);
        }
    }

    #[test]
    fn endpoints_determine_the_subcube() {
        let u = Vertex::parse("010110").unwrap();
        let v = Vertex::parse("011011").unwrap();
        let s = SubCube::from_endpoints(u, v).unwrap();
        assert_eq!(s.k(), 3);
        assert_eq!(s.axes(), vec![3, 4, 6]);
        assert!(s.contains(u) && s.contains(v));
        // local coordinates follow ascending axis order
        assert_eq!(s.embed_bits(0b000), 0b010010);
        assert_eq!(s.embed_bits(0b100), 0b011010);
    }
}
