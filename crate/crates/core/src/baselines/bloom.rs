use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::graph::NodeId;
use crate::simnet::Payload;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BloomParams {
    /// Filter size in bits.
    pub m: usize,
    /// Hash functions per insertion.
    pub h: usize,
    /// Key of the hash family, shared by every node of a run.
    pub key: u64,
}

impl Default for BloomParams {
    fn default() -> Self {
        Self { m: 256, h: 4, key: 0 }
    }
}

/// Fixed-size Bloom filter over node IDs, using double hashing
/// `g_i(x) = h1(x) + i * h2(x) mod m` from one keyed SHA-256.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BloomFilter {
    bits: Vec<u64>,
    m: usize,
    h: usize,
    key: u64,
}

impl BloomFilter {
    /// # Panics
    /// If `m` or `h` is zero.
    pub fn new(p: BloomParams) -> Self {
        assert!(p.m > 0 && p.h > 0, "bloom filter needs m > 0 and h > 0");
        Self { bits: vec![0; p.m.div_ceil(64)], m: p.m, h: p.h, key: p.key }
    }

    /// Every bit set, as sent by filter-poisoning adversaries.
    pub fn all_ones(p: BloomParams) -> Self {
        let mut f = Self::new(p);
        f.bits.iter_mut().for_each(|w| *w = u64::MAX);
        f.clear_tail();
        f
    }

    pub fn params(&self) -> BloomParams {
        BloomParams { m: self.m, h: self.h, key: self.key }
    }

    fn clear_tail(&mut self) {
        let extra = self.bits.len() * 64 - self.m;
        if extra > 0 {
            *self.bits.last_mut().unwrap() &= u64::MAX >> extra;
        }
    }

    fn positions(&self, id: NodeId) -> impl Iterator<Item = usize> {
        let mut hasher = Sha256::new();
        hasher.update(self.key.to_be_bytes());
        hasher.update((id as u32).to_be_bytes());
        let d = hasher.finalize();
        let h1 = u64::from_be_bytes(d[..8].try_into().unwrap());
        let h2 = u64::from_be_bytes(d[8..16].try_into().unwrap()) | 1;
        let m = self.m as u64;
        (0..self.h as u64).map(move |i| (h1.wrapping_add(i.wrapping_mul(h2)) % m) as usize)
    }

    pub fn insert(&mut self, id: NodeId) {
        for p in self.positions(id).collect::<Vec<_>>() {
            self.bits[p / 64] |= 1 << (p % 64);
        }
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.positions(id).all(|p| self.bits[p / 64] >> (p % 64) & 1 == 1)
    }

    /// In-place union. Filters with different parameters are ignored, since
    /// their bits index different hash positions.
    pub fn merge(&mut self, other: &BloomFilter) -> bool {
        if self.params() != other.params() {
            return false;
        }
        self.bits.iter_mut().zip(&other.bits).for_each(|(a, b)| *a |= b);
        true
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn byte_len(&self) -> usize {
        self.m.div_ceil(8)
    }
}

impl Payload for BloomFilter {
    fn wire_len(&self, _sig_len: usize) -> usize {
        self.byte_len()
    }
}
