//! Asynchronous Merkle trees.
//!
//! A tree whose leaves arrive in batches of known size. Each batch is hashed on
//! its own, with every foreign leaf treated as an opaque placeholder, up to the
//! highest nodes that depend only on that batch. Those nodes are the batch's
//! *layer checkpoints*. Once all batches are in, [`commit`] folds the
//! checkpoints into the root, computing only the nodes whose subtrees cross a
//! batch boundary.
//!
//! The canonical shape pairs adjacent nodes level by level. A level of odd
//! width promotes its last node to the next level with a dedicated hash, so no
//! padding leaves are ever introduced. Leaves, pairs and promotions are hashed
//! under distinct one-byte prefixes.
//!
//! [`classic_build`] builds the same tree the ordinary way and serves as the
//! reference the asynchronous path is checked against. Inclusion proofs are
//! produced from a fully materialized tree and verify against either root.
//!
//! ```
//! use amt_core::{build_batch, classic_root, commit, plan_tree};
//!
//! let leaves: Vec<Vec<u8>> = (0u8..14).map(|i| vec![i]).collect();
//! let plan = plan_tree(&[6, 8]).unwrap();
//! let blue = build_batch(&plan, 0, &leaves[..6]).unwrap();
//! let red = build_batch(&plan, 1, &leaves[6..]).unwrap();
//!
//! let outcome = commit(&plan, &[red, blue]).unwrap();
//! assert_eq!(outcome.pair_hashes + outcome.promotions, 3);
//! assert_eq!(outcome.root, classic_root(&leaves).unwrap());
//! ```

#![no_std]
#![deny(missing_docs)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod builder;
mod commit;
mod error;
mod geometry;
mod hash;
mod node;
mod oracle;
mod proof;

pub use builder::{
    build_batch, build_batch_with, checkpoint_positions, digest_placeholder_count, BatchResult,
};
pub use commit::{commit, commit_with, full_sync_internal_count, CommitOutcome};
pub use error::{Error, Result};
pub use geometry::{level_width, plan_tree, tree_height, Children, Position, TreePlan};
pub use hash::{
    hash_leaf, hash_pair, hash_promote, Digest32, Sha256Hasher, TreeHasher, LEAF_PREFIX,
    PAIR_PREFIX, PROMOTE_PREFIX,
};
pub use node::{BatchId, Node, NodeKind, Order, COMPOUND_SENTINEL};
pub use oracle::{classic_build, classic_build_with, classic_root, OracleTree};
pub use proof::{
    prove_inclusion, verify_inclusion, verify_inclusion_with, InclusionProof, ProofStep, Side,
};
