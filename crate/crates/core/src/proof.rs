//! Inclusion proofs over a fully materialized tree.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hash::{Digest32, Sha256Hasher, TreeHasher};
use crate::oracle::OracleTree;

/// Side on which a sibling sits relative to the path node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Sibling is the left child (order bit 0).
    Left,
    /// Sibling is the right child (order bit 1).
    Right,
}

/// One level transition on the path from a leaf to the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProofStep {
    /// Combine with a sibling digest.
    Pair {
        /// Digest of the sibling.
        sibling: Digest32,
        /// Where the sibling sits.
        sibling_side: Side,
    },
    /// The path node is the only child; promote it.
    Promote,
}

/// Path from one leaf to the root, leaf end first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InclusionProof {
    /// Leaf the proof is for.
    pub leaf_index: usize,
    /// One step per level.
    pub steps: Vec<ProofStep>,
}

/// Proof for leaf `leaf_index` of `tree`.
pub fn prove_inclusion(tree: &OracleTree, leaf_index: usize) -> Result<InclusionProof> {
    let n = tree.leaf_count();
    if leaf_index >= n {
        return Err(Error::OutOfRange {
            what: "leaf index",
            value: leaf_index,
            bound: n,
        });
    }
    let levels = tree.levels();
    let mut index = leaf_index;
    let mut steps = Vec::with_capacity(levels.len() - 1);
    for level in &levels[..levels.len() - 1] {
        let sibling = index ^ 1;
        let step = match level.get(sibling) {
            Some(&digest) => ProofStep::Pair {
                sibling: digest,
                sibling_side: if sibling < index {
                    Side::Left
                } else {
                    Side::Right
                },
            },
            None => ProofStep::Promote,
        };
        steps.push(step);
        index /= 2;
    }
    Ok(InclusionProof { leaf_index, steps })
}

/// SHA-256 [`verify_inclusion_with`].
pub fn verify_inclusion(root: &Digest32, leaf_data: &[u8], proof: &InclusionProof) -> bool {
    verify_inclusion_with::<Sha256Hasher>(root, leaf_data, proof)
}

/// Recomputes the root from `leaf_data` along `proof` and compares.
pub fn verify_inclusion_with<H: TreeHasher>(
    root: &Digest32,
    leaf_data: &[u8],
    proof: &InclusionProof,
) -> bool {
    let acc = proof
        .steps
        .iter()
        .fold(H::leaf(leaf_data), |acc, step| match *step {
            ProofStep::Pair {
                sibling,
                sibling_side: Side::Left,
            } => H::pair(&sibling, &acc),
            ProofStep::Pair {
                sibling,
                sibling_side: Side::Right,
            } => H::pair(&acc, &sibling),
            ProofStep::Promote => H::promote(&acc),
        });
    acc == *root
}
