use crate::geometry::Position;
use crate::hash::Digest32;

/// Batch identifier. Batches are numbered `0..B` in leaf order.
pub type BatchId = u32;

/// Batch id carried by compound nodes, whose subtrees span several batches.
pub const COMPOUND_SENTINEL: BatchId = u32::MAX;

/// Which child slot a node occupies under its parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    /// Bit 0. Also used for promoted single children and the root.
    Left = 0,
    /// Bit 1.
    Right = 1,
}

impl Order {
    /// Order bit for a node at `index` within its level.
    pub const fn of_index(index: usize) -> Self {
        if index & 1 == 0 {
            Order::Left
        } else {
            Order::Right
        }
    }

    /// The encoded bit.
    pub const fn bit(self) -> u8 {
        self as u8
    }

    /// Decodes a bit; anything other than 0 or 1 is rejected.
    pub const fn from_bit(bit: u8) -> Option<Self> {
        match bit {
            0 => Some(Order::Left),
            1 => Some(Order::Right),
            _ => None,
        }
    }
}

/// Role a node plays in an asynchronous build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    /// Hashed leaf.
    Leaf,
    /// Interior node computed within a single batch.
    Internal,
    /// Stand-in for a leaf owned by another batch. Has no data.
    DigestPlaceholder,
    /// Highest node a batch can compute on its own.
    LayerCheckpoint,
    /// Commit-time node whose subtree spans more than one batch.
    Compound,
}

/// A positioned tree node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Node {
    /// Where the node sits in the canonical shape.
    pub position: Position,
    /// Owning batch, or [`COMPOUND_SENTINEL`].
    pub batch: BatchId,
    /// Child slot under the parent.
    pub order: Order,
    /// Node role.
    pub kind: NodeKind,
    /// Digest; `None` only for placeholders.
    pub data: Option<Digest32>,
}

impl Node {
    /// A layer checkpoint owned by `batch`.
    pub fn checkpoint(position: Position, batch: BatchId, data: Digest32) -> Self {
        Node {
            position,
            batch,
            order: Order::of_index(position.index),
            kind: NodeKind::LayerCheckpoint,
            data: Some(data),
        }
    }

    /// A compound node produced at commit time.
    pub fn compound(position: Position, data: Digest32) -> Self {
        Node {
            position,
            batch: COMPOUND_SENTINEL,
            order: Order::of_index(position.index),
            kind: NodeKind::Compound,
            data: Some(data),
        }
    }

    /// A placeholder for a leaf that `batch` does not own.
    pub fn placeholder(position: Position, batch: BatchId) -> Self {
        Node {
            position,
            batch,
            order: Order::of_index(position.index),
            kind: NodeKind::DigestPlaceholder,
            data: None,
        }
    }
}
