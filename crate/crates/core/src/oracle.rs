//! Ordinary all-at-once Merkle build with the same shape and hash rules.
//!
//! Shares only the hash primitives with the asynchronous path.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hash::{Digest32, Sha256Hasher, TreeHasher};

/// Every level of a fully built tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleTree {
    levels: Vec<Vec<Digest32>>,
    hash_ops: usize,
}

impl OracleTree {
    /// Digests per level; `levels()[0]` are the leaf hashes, the last level is `[root]`.
    pub fn levels(&self) -> &[Vec<Digest32>] {
        &self.levels
    }

    /// Leaf count.
    pub fn leaf_count(&self) -> usize {
        self.levels[0].len()
    }

    /// Root level.
    pub fn height(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    /// Root digest.
    pub fn root(&self) -> Digest32 {
        self.levels[self.levels.len() - 1][0]
    }

    /// Hash evaluations spent building the tree.
    pub fn hash_ops(&self) -> usize {
        self.hash_ops
    }
}

/// SHA-256 [`classic_build_with`].
pub fn classic_build<L: AsRef<[u8]>>(leaves: &[L]) -> Result<OracleTree> {
    classic_build_with::<Sha256Hasher, L>(leaves)
}

/// Builds every level from the full leaf list.
pub fn classic_build_with<H: TreeHasher, L: AsRef<[u8]>>(leaves: &[L]) -> Result<OracleTree> {
    if leaves.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut hash_ops = leaves.len();
    let mut levels = Vec::new();
    levels.push(
        leaves
            .iter()
            .map(|l| H::leaf(l.as_ref()))
            .collect::<Vec<_>>(),
    );
    while levels[levels.len() - 1].len() > 1 {
        let below = &levels[levels.len() - 1];
        let above: Vec<Digest32> = below
            .chunks(2)
            .map(|c| match c {
                [l, r] => H::pair(l, r),
                [only] => H::promote(only),
                _ => unreachable!(),
            })
            .collect();
        hash_ops += above.len();
        levels.push(above);
    }
    Ok(OracleTree { levels, hash_ops })
}

/// Root of [`classic_build`].
pub fn classic_root<L: AsRef<[u8]>>(leaves: &[L]) -> Result<Digest32> {
    classic_build(leaves).map(|t| t.root())
}
