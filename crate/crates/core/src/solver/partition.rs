use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Splits `0..total` into consecutive, non-overlapping blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
}

impl BlockPartition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidInput("partition needs at least one block".into()));
        }
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidInput(format!("block {i} has size 0")));
        }
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut total = 0;
        for &s in &sizes {
            offsets.push(total);
            total += s;
        }
        Ok(Self {
            sizes,
            offsets,
            total,
        })
    }

    /// `blocks` blocks of `size` entries each.
    pub fn uniform(blocks: usize, size: usize) -> Result<Self> {
        Self::new(vec![size; blocks])
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn size(&self, block: usize) -> usize {
        self.sizes[block]
    }

    pub fn range(&self, block: usize) -> Range<usize> {
        self.offsets[block]..self.offsets[block] + self.sizes[block]
    }

    pub fn ranges(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        (0..self.num_blocks()).map(|i| self.range(i))
    }

    /// Block containing the flat index `index`.
    pub fn block_of(&self, index: usize) -> Option<usize> {
        if index >= self.total {
            return None;
        }
        Some(self.offsets.partition_point(|&o| o <= index) - 1)
    }

    /// Appends one block of `size` entries.
    pub fn with_block(&self, size: usize) -> Result<Self> {
        let mut sizes = self.sizes.clone();
        sizes.push(size);
        Self::new(sizes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn offsets_and_total() {
        let p = BlockPartition::new(vec![2, 3, 1]).unwrap();
        assert_eq!(p.offsets(), &[0, 2, 5]);
        assert_eq!(p.total(), 6);
        assert_eq!(p.range(1), 2..5);
        assert_eq!(p.block_of(4), Some(1));
        assert_eq!(p.block_of(5), Some(2));
        assert_eq!(p.block_of(6), None);
    }

    #[test]
    fn rejects_empty_and_zero_sized() {
        assert!(BlockPartition::new(vec![]).is_err());
        assert!(BlockPartition::new(vec![2, 0]).is_err());
    }

    proptest! {
        #[test]
        fn blocks_tile_the_index_range(sizes in prop::collection::vec(1usize..6, 1..12)) {
            let p = BlockPartition::new(sizes.clone()).unwrap();
            prop_assert_eq!(p.total(), sizes.iter().sum::<usize>());
            prop_assert_eq!(p.offsets()[0], 0);
            prop_assert!(p.offsets().windows(2).all(|w| w[0] < w[1]));
            let mut covered = vec![0u32; p.total()];
            for r in p.ranges() {
                for i in r {
                    covered[i] += 1;
                }
            }
            prop_assert!(covered.iter().all(|&c| c == 1));
            for i in 0..p.total() {
                let b = p.block_of(i).unwrap();
                prop_assert!(p.range(b).contains(&i));
            }
        }
    }
}
