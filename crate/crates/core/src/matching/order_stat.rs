//! Set of integer keys from a fixed universe `0..n` with select-by-rank.
//!
//! Backed by a Fenwick tree of occupancy counts; insert, remove and select
//! are all `O(log n)`.

#[derive(Clone, Debug)]
pub struct OrderStatSet {
    tree: Vec<u32>,
    len: usize,
    top_bit: usize,
}

impl OrderStatSet {
    pub fn new(universe: usize) -> Self {
        let top_bit = if universe == 0 {
            0
        } else {
            1 << (usize::BITS - 1 - universe.leading_zeros())
        };
        Self {
            tree: vec![0; universe + 1],
            len: 0,
            top_bit,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn add(&mut self, key: usize, delta: i32) {
        let mut i = key + 1;
        while i < self.tree.len() {
            self.tree[i] = self.tree[i].wrapping_add_signed(delta);
            i += i & i.wrapping_neg();
        }
    }

    /// Inserts `key`. The key must not already be present.
    pub fn insert(&mut self, key: usize) {
        self.add(key, 1);
        self.len += 1;
    }

    /// Removes `key`. The key must be present.
    pub fn remove(&mut self, key: usize) {
        self.add(key, -1);
        self.len -= 1;
    }

    /// Number of keys strictly smaller than `key`.
    pub fn rank(&self, key: usize) -> usize {
        let mut i = key.min(self.tree.len() - 1);
        let mut acc = 0usize;
        while i > 0 {
            acc += self.tree[i] as usize;
            i &= i - 1;
        }
        acc
    }

    /// The `k`-th smallest key (0-based), if `k < len`.
    pub fn select(&self, k: usize) -> Option<usize> {
        if k >= self.len {
            return None;
        }
        let mut remaining = k as u32;
        let mut pos = 0usize;
        let mut step = self.top_bit;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= remaining {
                pos = next;
                remaining -= self.tree[next];
            }
            step >>= 1;
        }
        Some(pos)
    }
}
