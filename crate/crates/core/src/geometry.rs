//! Canonical tree shape.
//!
//! Level 0 holds the `n` leaves. Level `l + 1` has `ceil(width(l) / 2)` nodes;
//! node `(l + 1, i)` has children `(l, 2i)` and, when it exists, `(l, 2i + 1)`.
//! A parent with a single child is a promotion. Under this shape node `(l, i)`
//! covers the leaves `[i * 2^l, min((i + 1) * 2^l, n))`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::hash::{Digest32, Sha256Hasher, TreeHasher};
use crate::node::{BatchId, Order, COMPOUND_SENTINEL};

/// Node coordinates: `level` 0 is the leaf level, `index` counts from the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    /// Distance above the leaves.
    pub level: u32,
    /// Zero-based offset within the level.
    pub index: usize,
}

impl Position {
    /// Shorthand constructor.
    pub const fn new(level: u32, index: usize) -> Self {
        Position { level, index }
    }
}

/// Children of an interior position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Children {
    /// Regular two-child node.
    Pair(Position, Position),
    /// Promotion of the last node of an odd-width level.
    Single(Position),
}

impl Children {
    /// Children as a slice-like iterator, left first.
    pub fn iter(&self) -> impl Iterator<Item = Position> {
        let (a, b) = match *self {
            Children::Pair(l, r) => (l, Some(r)),
            Children::Single(c) => (c, None),
        };
        core::iter::once(a).chain(b)
    }
}

/// Height of a tree with `n` leaves: 0 for a single leaf, else `ceil(log2 n)`.
pub fn tree_height(n: usize) -> Result<u32> {
    match n {
        0 => Err(Error::InvalidPlan("tree needs at least one leaf")),
        1 => Ok(0),
        _ => Ok(usize::BITS - (n - 1).leading_zeros()),
    }
}

/// Number of nodes at `level` in a tree with `n` leaves.
pub fn level_width(n: usize, level: u32) -> Result<usize> {
    let height = tree_height(n)?;
    if level > height {
        return Err(Error::OutOfRange {
            what: "level",
            value: level as usize,
            bound: height as usize + 1,
        });
    }
    Ok((0..level).fold(n, |w, _| w.div_ceil(2)))
}

/// Fixed geometry of a tree whose batch sizes are known up front.
///
/// Batches occupy contiguous leaf ranges, left to right, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreePlan {
    batch_sizes: Vec<usize>,
    batch_offsets: Vec<usize>,
    total_leaves: usize,
    height: u32,
    level_widths: Vec<usize>,
}

/// Builds the plan for the given per-batch leaf counts.
pub fn plan_tree(batch_sizes: &[usize]) -> Result<TreePlan> {
    if batch_sizes.is_empty() {
        return Err(Error::InvalidPlan("at least one batch is required"));
    }
    if batch_sizes.contains(&0) {
        return Err(Error::InvalidPlan("batch sizes must be positive"));
    }
    if batch_sizes.len() >= COMPOUND_SENTINEL as usize {
        return Err(Error::InvalidPlan("too many batches"));
    }
    let mut batch_offsets = Vec::with_capacity(batch_sizes.len());
    let mut total: usize = 0;
    for &size in batch_sizes {
        batch_offsets.push(total);
        total = total
            .checked_add(size)
            .ok_or(Error::InvalidPlan("leaf count overflows"))?;
    }
    let height = tree_height(total)?;
    let mut level_widths = Vec::with_capacity(height as usize + 1);
    let mut w = total;
    level_widths.push(w);
    for _ in 0..height {
        w = w.div_ceil(2);
        level_widths.push(w);
    }
    debug_assert_eq!(level_widths.last(), Some(&1));
    Ok(TreePlan {
        batch_sizes: batch_sizes.to_vec(),
        batch_offsets,
        total_leaves: total,
        height,
        level_widths,
    })
}

impl TreePlan {
    /// Leaf count per batch.
    pub fn batch_sizes(&self) -> &[usize] {
        &self.batch_sizes
    }

    /// First leaf index of each batch.
    pub fn batch_offsets(&self) -> &[usize] {
        &self.batch_offsets
    }

    /// Total leaf count `n`.
    pub fn total_leaves(&self) -> usize {
        self.total_leaves
    }

    /// Root level.
    pub fn height(&self) -> u32 {
        self.height
    }

    /// Width of every level, leaves first.
    pub fn level_widths(&self) -> &[usize] {
        &self.level_widths
    }

    /// Number of batches `B`.
    pub fn batch_count(&self) -> usize {
        self.batch_sizes.len()
    }

    /// Width of one level.
    pub fn level_width(&self, level: u32) -> Result<usize> {
        self.level_widths
            .get(level as usize)
            .copied()
            .ok_or(Error::OutOfRange {
                what: "level",
                value: level as usize,
                bound: self.level_widths.len(),
            })
    }

    /// Count of non-leaf nodes, i.e. the interior hashes of a full build.
    pub fn internal_node_count(&self) -> usize {
        self.level_widths[1..].iter().sum()
    }

    /// Leaf range owned by `batch`.
    pub fn batch_range(&self, batch: BatchId) -> Result<Range<usize>> {
        let b = batch as usize;
        match (self.batch_offsets.get(b), self.batch_sizes.get(b)) {
            (Some(&start), Some(&size)) => Ok(start..start + size),
            _ => Err(Error::OutOfRange {
                what: "batch id",
                value: b,
                bound: self.batch_count(),
            }),
        }
    }

    /// Whether `pos` exists in this tree.
    pub fn contains(&self, pos: Position) -> bool {
        self.level_widths
            .get(pos.level as usize)
            .is_some_and(|&w| pos.index < w)
    }

    fn check(&self, pos: Position) -> Result<()> {
        let width = self.level_width(pos.level)?;
        if pos.index < width {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                what: "index",
                value: pos.index,
                bound: width,
            })
        }
    }

    /// Parent of a non-root position.
    pub fn parent_of(&self, pos: Position) -> Result<Position> {
        self.check(pos)?;
        if pos.level >= self.height {
            return Err(Error::OutOfRange {
                what: "level",
                value: pos.level as usize,
                bound: self.height as usize,
            });
        }
        Ok(Position::new(pos.level + 1, pos.index / 2))
    }

    /// Children of a non-leaf position.
    pub fn children_of(&self, pos: Position) -> Result<Children> {
        self.check(pos)?;
        if pos.level == 0 {
            return Err(Error::OutOfRange {
                what: "level",
                value: 0,
                bound: 0,
            });
        }
        let below = self.level_widths[pos.level as usize - 1];
        let left = Position::new(pos.level - 1, 2 * pos.index);
        let right = 2 * pos.index + 1;
        if right < below {
            Ok(Children::Pair(left, Position::new(pos.level - 1, right)))
        } else {
            Ok(Children::Single(left))
        }
    }

    /// Child slot of `pos` under its parent.
    pub fn order_of(&self, pos: Position) -> Order {
        Order::of_index(pos.index)
    }

    /// Batch owning a leaf.
    pub fn owner_of_leaf(&self, leaf_index: usize) -> Result<BatchId> {
        if leaf_index >= self.total_leaves {
            return Err(Error::OutOfRange {
                what: "leaf index",
                value: leaf_index,
                bound: self.total_leaves,
            });
        }
        // Offsets are strictly increasing, so the owner is the last offset <= leaf_index.
        let owner = self.batch_offsets.partition_point(|&o| o <= leaf_index) - 1;
        Ok(owner as BatchId)
    }

    /// Leaves covered by the subtree rooted at `pos`.
    pub fn leaf_span(&self, pos: Position) -> Result<Range<usize>> {
        self.check(pos)?;
        let unit = 1usize << pos.level;
        let start = pos.index * unit;
        Ok(start..(start + unit).min(self.total_leaves))
    }

    /// Canonical text used to fingerprint the plan: `{"batch_sizes":[..]}`.
    pub fn canonical_json(&self) -> String {
        let mut s = String::from("{\"batch_sizes\":[");
        for (i, size) in self.batch_sizes.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{size}");
        }
        s.push_str("]}");
        s
    }

    /// Leaf hash of [`TreePlan::canonical_json`] under `H`.
    pub fn fingerprint_with<H: TreeHasher>(&self) -> Digest32 {
        H::leaf(self.canonical_json().as_bytes())
    }

    /// SHA-256 plan fingerprint.
    pub fn fingerprint(&self) -> Digest32 {
        self.fingerprint_with::<Sha256Hasher>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(level: u32, index: usize) -> Position {
        Position::new(level, index)
    }

    #[test]
    fn heights() {
        assert_eq!(tree_height(8), Ok(3));
        assert_eq!(tree_height(14), Ok(4));
        assert_eq!(tree_height(1), Ok(0));
        assert_eq!(tree_height(2), Ok(1));
        assert!(matches!(tree_height(0), Err(Error::InvalidPlan(_))));
    }

    #[test]
    fn widths() {
        assert_eq!(level_width(14, 1), Ok(7));
        assert_eq!(level_width(8, 2), Ok(2));
        assert_eq!(level_width(14, 4), Ok(1));
        assert!(matches!(level_width(14, 5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn plan_examples() {
        let plan = plan_tree(&[6, 8]).unwrap();
        assert_eq!(plan.total_leaves(), 14);
        assert_eq!(plan.height(), 4);
        assert_eq!(plan.batch_offsets(), &[0, 6]);
        assert_eq!(plan.level_widths(), &[14, 7, 4, 2, 1]);

        let plan = plan_tree(&[1]).unwrap();
        assert_eq!((plan.total_leaves(), plan.height()), (1, 0));
        assert_eq!(plan.level_widths(), &[1]);

        let plan = plan_tree(&[3, 2]).unwrap();
        assert_eq!((plan.total_leaves(), plan.height()), (5, 3));
        assert_eq!(plan.batch_offsets(), &[0, 3]);
    }

    #[test]
    fn plan_rejects_bad_sizes() {
        assert!(matches!(plan_tree(&[]), Err(Error::InvalidPlan(_))));
        assert!(matches!(plan_tree(&[3, 0]), Err(Error::InvalidPlan(_))));
    }

    #[test]
    fn internal_counts() {
        assert_eq!(plan_tree(&[6, 8]).unwrap().internal_node_count(), 14);
        assert_eq!(plan_tree(&[1]).unwrap().internal_node_count(), 0);
        assert_eq!(plan_tree(&[3, 2]).unwrap().internal_node_count(), 6);
    }

    #[test]
    fn parents() {
        let plan = plan_tree(&[6, 8]).unwrap();
        assert_eq!(plan.parent_of(p(0, 5)), Ok(p(1, 2)));
        assert_eq!(plan.parent_of(p(1, 6)), Ok(p(2, 3)));
        assert!(plan.parent_of(p(4, 0)).is_err());
        assert!(plan.parent_of(p(1, 7)).is_err());
        let plan = plan_tree(&[3, 2]).unwrap();
        assert_eq!(plan.parent_of(p(2, 1)), Ok(p(3, 0)));
    }

    #[test]
    fn children() {
        let plan = plan_tree(&[6, 8]).unwrap();
        assert_eq!(plan.children_of(p(2, 3)), Ok(Children::Single(p(1, 6))));
        assert_eq!(
            plan.children_of(p(4, 0)),
            Ok(Children::Pair(p(3, 0), p(3, 1)))
        );
        assert!(plan.children_of(p(0, 0)).is_err());
        let plan = plan_tree(&[3, 2]).unwrap();
        assert_eq!(plan.children_of(p(1, 2)), Ok(Children::Single(p(0, 4))));
    }

    #[test]
    fn owners() {
        let plan = plan_tree(&[6, 8]).unwrap();
        assert_eq!(plan.owner_of_leaf(5), Ok(0));
        assert_eq!(plan.owner_of_leaf(6), Ok(1));
        assert_eq!(plan.owner_of_leaf(13), Ok(1));
        assert!(plan.owner_of_leaf(14).is_err());
        assert_eq!(plan_tree(&[1]).unwrap().owner_of_leaf(0), Ok(0));
    }

    #[test]
    fn spans_clip_at_right_edge() {
        let plan = plan_tree(&[6, 8]).unwrap();
        assert_eq!(plan.leaf_span(p(2, 3)), Ok(12..14));
        assert_eq!(plan.leaf_span(p(3, 1)), Ok(8..14));
        assert_eq!(plan.leaf_span(p(4, 0)), Ok(0..14));
    }

    #[test]
    fn canonical_json_has_no_whitespace() {
        let plan = plan_tree(&[6, 8]).unwrap();
        assert_eq!(plan.canonical_json(), "{\"batch_sizes\":[6,8]}");
        assert_ne!(
            plan.fingerprint(),
            plan_tree(&[8, 6]).unwrap().fingerprint()
        );
    }
}
