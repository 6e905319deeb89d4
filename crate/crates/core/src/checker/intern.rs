use hashbrown::{DefaultHashBuilder, HashTable};
use std::hash::BuildHasher;

/// Fixed-width rows of `u64`, deduplicated and numbered in insertion order.
#[derive(Clone, Debug, Default)]
pub(crate) struct Interner {
    width: usize,
    data: Vec<u64>,
    table: HashTable<u32>,
    hasher: DefaultHashBuilder,
}

impl Interner {
    pub fn new(width: usize) -> Self {
        Interner { width, ..Default::default() }
    }

    pub fn len(&self) -> usize {
        // width 0: every row is the same empty slice
        self.data.len().checked_div(self.width).unwrap_or(usize::from(!self.table.is_empty()))
    }

    pub fn row(&self, id: u32) -> &[u64] {
        let s = id as usize * self.width;
        &self.data[s..s + self.width]
    }

    pub fn get(&self, key: &[u64]) -> Option<u32> {
        let h = self.hasher.hash_one(key);
        self.table.find(h, |&id| self.row(id) == key).copied()
    }

    /// Returns the id of `key` and whether it was newly inserted.
    pub fn intern(&mut self, key: &[u64]) -> (u32, bool) {
        debug_assert_eq!(key.len(), self.width);
        let h = self.hasher.hash_one(key);
        if let Some(&id) = self.table.find(h, |&id| {
            let s = id as usize * self.width;
            &self.data[s..s + self.width] == key
        }) {
            return (id, false);
        }
        let id = u32::try_from(self.len()).expect("state store exceeds u32 ids");
        self.data.extend_from_slice(key);
        let (data, width, hasher) = (&self.data, self.width, &self.hasher);
        self.table.insert_unique(h, id, |&id| {
            let s = id as usize * width;
            hasher.hash_one(&data[s..s + width])
        });
        (id, true)
    }

    pub fn memory_bytes(&self) -> usize {
        self.data.capacity() * 8 + self.table.capacity() * 4
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interns_in_order() {
        let mut i = Interner::new(2);
        assert_eq!(i.intern(&[1, 2]), (0, true));
        assert_eq!(i.intern(&[2, 1]), (1, true));
        assert_eq!(i.intern(&[1, 2]), (0, false));
        assert_eq!(i.get(&[2, 1]), Some(1));
        assert_eq!(i.get(&[3, 3]), None);
        assert_eq!(i.row(1), &[2, 1]);
        for k in 0..10_000u64 {
            i.intern(&[k, k * 7]);
        }
        assert_eq!(i.get(&[9_999, 69_993]).map(|id| i.row(id)[0]), Some(9_999));
    }
}
