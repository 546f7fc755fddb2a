use serde::{Serialize, Serializer};

/// Set of calorie totals in `0..=bound`, stored as a bitset.
#[derive(Clone, PartialEq, Eq)]
pub struct ReachableSet {
    words: Vec<u64>,
    bound: u32,
}

impl ReachableSet {
    pub fn empty(bound: u32) -> Self {
        let words = vec![0; bound as usize / 64 + 1];
        Self { words, bound }
    }

    /// Largest total this set can hold; larger sums were discarded.
    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn insert(&mut self, value: u32) -> bool {
        if value > self.bound {
            return false;
        }
        let (w, b) = (value as usize / 64, value % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn contains(&self, value: u32) -> bool {
        value <= self.bound && self.words[value as usize / 64] & (1 << (value % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn min(&self) -> Option<u32> {
        self.iter().next()
    }

    pub fn max(&self) -> Option<u32> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i as u32 * 64 + 63 - w.leading_zeros())
    }

    /// Ascending iteration over members.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros();
                w &= w - 1;
                Some(i as u32 * 64 + bit)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }

    pub fn union_with(&mut self, other: &ReachableSet) {
        for (dst, src) in self.words.iter_mut().zip(&other.words) {
            *dst |= src;
        }
    }

    /// `self |= other + shift`, truncated at `self.bound`.
    pub fn or_shifted(&mut self, other: &ReachableSet, shift: u32) {
        if shift > self.bound {
            return;
        }
        let word_shift = shift as usize / 64;
        let bit_shift = shift % 64;
        let n = self.words.len();
        for (i, &src) in other.words.iter().enumerate() {
            if src == 0 {
                continue;
            }
            let dst = i + word_shift;
            if dst >= n {
                break;
            }
            self.words[dst] |= src << bit_shift;
            if bit_shift != 0 && dst + 1 < n {
                self.words[dst + 1] |= src >> (64 - bit_shift);
            }
        }
        self.clear_above_bound();
    }

    /// True iff some member lies in `lo..=hi`.
    pub fn intersects_range(&self, lo: u32, hi: u32) -> bool {
        let hi = hi.min(self.bound);
        if lo > hi {
            return false;
        }
        let (lw, hw) = (lo as usize / 64, hi as usize / 64);
        let low_mask = u64::MAX << (lo % 64);
        let high_mask = u64::MAX >> (63 - hi % 64);
        if lw == hw {
            return self.words[lw] & low_mask & high_mask != 0;
        }
        self.words[lw] & low_mask != 0
            || self.words[lw + 1..hw].iter().any(|&w| w != 0)
            || self.words[hw] & high_mask != 0
    }

    /// Nearest member to `target` (lower one on ties), if any.
    pub fn nearest(&self, target: u32) -> Option<u32> {
        let below = (0..=target.min(self.bound)).rev().find(|&v| self.contains(v));
        let above = (target.saturating_add(1)..=self.bound).find(|&v| self.contains(v));
        match (below, above) {
            (Some(b), Some(a)) => Some(if target - b <= a - target { b } else { a }),
            (b, a) => b.or(a),
        }
    }

    /// Minkowski sum `{a + b}` truncated at `bound`.
    pub fn sumset(&self, other: &ReachableSet, bound: u32) -> ReachableSet {
        let mut out = ReachableSet::empty(bound);
        let (sparse, dense) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        for a in sparse.iter() {
            if a > bound {
                break;
            }
            out.or_shifted(dense, a);
        }
        out
    }

    fn clear_above_bound(&mut self) {
        let last = self.words.len() - 1;
        let keep = self.bound % 64;
        if keep != 63 {
            self.words[last] &= (1u64 << (keep + 1)) - 1;
        }
    }
}

impl FromIterator<u32> for ReachableSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        let values: Vec<u32> = iter.into_iter().collect();
        let mut set = ReachableSet::empty(values.iter().copied().max().unwrap_or(0));
        for v in values {
            set.insert(v);
        }
        set
    }
}

impl std::fmt::Debug for ReachableSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReachableSet")
            .field("bound", &self.bound)
            .field("len", &self.len())
            .field("min", &self.min())
            .field("max", &self.max())
            .finish()
    }
}

impl Serialize for ReachableSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}
