//! Domain-separated hash primitives.
//!
//! Every digest in the tree is `H(prefix || payload)` with a one-byte prefix
//! that says what kind of node produced it. A leaf can therefore never be
//! replayed as an interior node, and a promoted node never equals a pair of
//! identical children.

use core::fmt;

use sha2::{Digest as _, Sha256};

/// Prefix for leaf hashes: `H(0x00 || data)`.
pub const LEAF_PREFIX: u8 = 0x00;
/// Prefix for two-child nodes: `H(0x01 || left || right)`.
pub const PAIR_PREFIX: u8 = 0x01;
/// Prefix for single-child (promoted) nodes: `H(0x02 || child)`.
pub const PROMOTE_PREFIX: u8 = 0x02;

/// A 32-byte hash value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Digest32(pub [u8; 32]);

impl Digest32 {
    /// Raw bytes.
    pub const fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }
}

impl From<[u8; 32]> for Digest32 {
    fn from(bytes: [u8; 32]) -> Self {
        Digest32(bytes)
    }
}

impl AsRef<[u8]> for Digest32 {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::LowerHex for Digest32 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Digest32 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(self, f)
    }
}

impl fmt::Debug for Digest32 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest32({self:x})")
    }
}

/// A 256-bit hash function driving the tree.
///
/// Implementors provide [`TreeHasher::hash_tagged`]; the node-level helpers are
/// derived from it so that the prefixes stay fixed regardless of the function.
pub trait TreeHasher {
    /// Hashes `tag` followed by the concatenation of `parts`.
    fn hash_tagged(tag: u8, parts: &[&[u8]]) -> Digest32;

    /// Leaf digest.
    fn leaf(data: &[u8]) -> Digest32 {
        Self::hash_tagged(LEAF_PREFIX, &[data])
    }

    /// Digest of a node with two children. Not symmetric.
    fn pair(left: &Digest32, right: &Digest32) -> Digest32 {
        Self::hash_tagged(PAIR_PREFIX, &[&left.0, &right.0])
    }

    /// Digest of a node whose only child is `child`.
    fn promote(child: &Digest32) -> Digest32 {
        Self::hash_tagged(PROMOTE_PREFIX, &[&child.0])
    }
}

/// SHA-256, the default tree hash.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sha256Hasher;

impl TreeHasher for Sha256Hasher {
    fn hash_tagged(tag: u8, parts: &[&[u8]]) -> Digest32 {
        let mut hasher = Sha256::new();
        hasher.update([tag]);
        for part in parts {
            hasher.update(part);
        }
        Digest32(hasher.finalize().into())
    }
}

/// SHA-256 leaf digest.
pub fn hash_leaf(data: &[u8]) -> Digest32 {
    Sha256Hasher::leaf(data)
}

/// SHA-256 digest of a two-child node.
pub fn hash_pair(left: &Digest32, right: &Digest32) -> Digest32 {
    Sha256Hasher::pair(left, right)
}

/// SHA-256 digest of a promoted single child.
pub fn hash_promote(child: &Digest32) -> Digest32 {
    Sha256Hasher::promote(child)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::format;

    #[test]
    fn empty_leaf_is_sha256_of_zero_byte() {
        // sha256(b"\x00"), computed with coreutils sha256sum
        let expected = "6e340b9cffb37a989ca544e6bb780a2c78901d3fb33738768511a30617afa01d";
        assert_eq!(format!("{:x}", hash_leaf(b"")), expected);
    }

    #[test]
    fn leaf_hash_is_deterministic_and_input_sensitive() {
        assert_eq!(hash_leaf(b"a"), hash_leaf(b"a"));
        assert_ne!(hash_leaf(b"a"), hash_leaf(b"b"));
    }

    #[test]
    fn pair_is_order_sensitive() {
        let x = hash_leaf(b"x");
        let y = hash_leaf(b"y");
        assert_ne!(hash_pair(&x, &y), hash_pair(&y, &x));
    }

    #[test]
    fn prefixes_separate_domains() {
        let x = hash_leaf(b"x");
        assert_ne!(hash_promote(&x), hash_pair(&x, &x));
        assert_ne!(hash_promote(&x), hash_leaf(&x.0));
        let mut concat = [0u8; 64];
        concat[..32].copy_from_slice(&x.0);
        concat[32..].copy_from_slice(&x.0);
        assert_ne!(hash_pair(&x, &x), hash_leaf(&concat));
    }

    #[test]
    fn hex_is_lowercase_64_chars() {
        let s = format!("{}", hash_leaf(b"abc"));
        assert_eq!(s.len(), 64);
        assert!(s
            .chars()
            .all(|c| c.is_ascii_digit() || ('a'..='f').contains(&c)));
    }
}
