//! Synchronous commit.
//!
//! Checkpoints from all batches are walked left to right and pushed on a
//! stack. Whenever the top of the stack is a complete right sibling of the
//! node below it, the two are hashed into their parent; whenever it is the
//! sole child of a promotion, it is promoted. When the last checkpoint has
//! been absorbed the stack holds only the root.

use alloc::vec::Vec;

use crate::builder::{checkpoint_positions, BatchResult};
use crate::error::{Error, Result};
use crate::geometry::{Children, Position, TreePlan};
use crate::hash::{Digest32, Sha256Hasher, TreeHasher};
use crate::node::{BatchId, Node, NodeKind, Order};

/// Root plus an account of the work the commit did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitOutcome {
    /// Tree root.
    pub root: Digest32,
    /// Two-child hashes evaluated.
    pub pair_hashes: usize,
    /// Promotion hashes evaluated.
    pub promotions: usize,
    /// Nodes computed during the commit, in evaluation order (root last).
    pub computed_nodes: Vec<Node>,
    /// Checkpoints consumed across all batches.
    pub checkpoint_count: usize,
}

/// Interior hashes of a monolithic build of the same tree.
pub fn full_sync_internal_count(plan: &TreePlan) -> usize {
    plan.internal_node_count()
}

/// SHA-256 [`commit_with`].
pub fn commit(plan: &TreePlan, results: &[BatchResult]) -> Result<CommitOutcome> {
    commit_with::<Sha256Hasher>(plan, results)
}

struct Pending {
    position: Position,
    order: Order,
    digest: Digest32,
}

/// Folds the checkpoints of every batch into the root.
///
/// `results` may be given in any order but must hold exactly one entry per
/// planned batch, built against `plan`.
pub fn commit_with<H: TreeHasher>(
    plan: &TreePlan,
    results: &[BatchResult],
) -> Result<CommitOutcome> {
    let by_batch = validate::<H>(plan, results)?;

    let checkpoint_count = by_batch.iter().map(|r| r.checkpoints.len()).sum();
    let mut stack: Vec<Pending> = Vec::with_capacity(plan.height() as usize + 2);
    let mut computed_nodes = Vec::new();
    let mut pair_hashes = 0;
    let mut promotions = 0;

    for cp in by_batch.iter().flat_map(|r| r.checkpoints.iter()) {
        stack.push(Pending {
            position: cp.position,
            order: cp.order,
            digest: cp.data.expect("validated checkpoint carries data"),
        });
        loop {
            let top = stack.last().expect("just pushed");
            if top.position.level == plan.height() {
                break;
            }
            let parent = plan.parent_of(top.position)?;
            let digest = match plan.children_of(parent)? {
                Children::Single(_) => {
                    let top = stack.pop().expect("non-empty");
                    promotions += 1;
                    H::promote(&top.digest)
                }
                Children::Pair(l, r) => {
                    let n = stack.len();
                    if top.position != r || n < 2 || stack[n - 2].position != l {
                        break;
                    }
                    let b = stack.pop().expect("two entries");
                    let a = stack.pop().expect("two entries");
                    let (left, right) = match (a.order, b.order) {
                        (Order::Left, Order::Right) => (a, b),
                        (Order::Right, Order::Left) => (b, a),
                        _ => {
                            return Err(Error::CorruptResult {
                                batch: crate::node::COMPOUND_SENTINEL,
                                reason: "siblings share an order bit",
                            })
                        }
                    };
                    pair_hashes += 1;
                    H::pair(&left.digest, &right.digest)
                }
            };
            let node = Node::compound(parent, digest);
            computed_nodes.push(node);
            stack.push(Pending {
                position: parent,
                order: node.order,
                digest,
            });
        }
    }

    match stack.as_slice() {
        [only] if only.position == Position::new(plan.height(), 0) => Ok(CommitOutcome {
            root: only.digest,
            pair_hashes,
            promotions,
            computed_nodes,
            checkpoint_count,
        }),
        _ => Err(Error::CorruptResult {
            batch: crate::node::COMPOUND_SENTINEL,
            reason: "checkpoints do not fold to a single root",
        }),
    }
}

/// Checks the results against the plan and returns them indexed by batch.
fn validate<'a, H: TreeHasher>(
    plan: &TreePlan,
    results: &'a [BatchResult],
) -> Result<Vec<&'a BatchResult>> {
    let fingerprint = plan.fingerprint_with::<H>();
    let mut slots: Vec<Option<&BatchResult>> = alloc::vec![None; plan.batch_count()];
    for result in results {
        let id = result.batch_id;
        let slot = slots.get_mut(id as usize).ok_or(Error::CorruptResult {
            batch: id,
            reason: "batch id not in plan",
        })?;
        if slot.is_some() {
            return Err(Error::DuplicateBatch(id));
        }
        if result.plan_fingerprint != fingerprint {
            return Err(Error::PlanMismatch(id));
        }
        check_checkpoints(plan, id, result)?;
        *slot = Some(result);
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(b, r)| {
            r.ok_or(Error::IncompleteCommit {
                missing: b as BatchId,
            })
        })
        .collect()
}

fn check_checkpoints(plan: &TreePlan, batch: BatchId, result: &BatchResult) -> Result<()> {
    let corrupt = |reason| Err(Error::CorruptResult { batch, reason });
    let expected = checkpoint_positions(plan, batch)?;
    if expected.len() != result.checkpoints.len() {
        return corrupt("wrong number of checkpoints");
    }
    for (node, &pos) in result.checkpoints.iter().zip(&expected) {
        if node.position != pos {
            return corrupt("checkpoint position disagrees with plan geometry");
        }
        if node.kind != NodeKind::LayerCheckpoint {
            return corrupt("node is not a layer checkpoint");
        }
        if node.batch != batch {
            return corrupt("checkpoint tagged with another batch");
        }
        if node.order != plan.order_of(pos) {
            return corrupt("order bit disagrees with position");
        }
        if node.data.is_none() {
            return corrupt("checkpoint without data");
        }
    }
    Ok(())
}
