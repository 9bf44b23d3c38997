//! On-disk formats.
//!
//! * Leaf files: length-prefixed binary records (`u32` little-endian length,
//!   then payload), or newline-delimited lowercase hex with `--format hex`.
//! * Batch manifest: JSON naming the hash and one leaf file per batch.
//! * Checkpoint file: JSON holding one batch's layer checkpoints.
//! * Proof file: JSON inclusion proof.
//!
//! Digests are always 64 lowercase hex characters without a prefix.

use std::fs;
use std::path::{Path, PathBuf};

use amt_core::{
    checkpoint_positions, plan_tree, BatchId, BatchResult, Digest32, InclusionProof, Node,
    NodeKind, Order, Position, ProofStep, Side, TreePlan,
};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const CHECKPOINT_FILE_VERSION: u32 = 1;
pub const SUPPORTED_HASH: &str = "sha256";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum LeafFormat {
    #[default]
    Bin,
    Hex,
}

pub fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let bytes = read_file(path)?;
    serde_json::from_slice(&bytes).map_err(|source| CliError::Json {
        path: path.to_owned(),
        source,
    })
}

/// Compact JSON followed by a newline.
pub fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report types always serialize");
    s.push('\n');
    s
}

pub fn decode_leaves(bytes: &[u8], format: LeafFormat) -> CliResult<Vec<Vec<u8>>> {
    match format {
        LeafFormat::Bin => decode_bin_leaves(bytes),
        LeafFormat::Hex => decode_hex_leaves(bytes),
    }
}

pub fn read_leaves(path: &Path, format: LeafFormat) -> CliResult<Vec<Vec<u8>>> {
    decode_leaves(&read_file(path)?, format)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

fn decode_bin_leaves(mut bytes: &[u8]) -> CliResult<Vec<Vec<u8>>> {
    let mut leaves = Vec::new();
    while !bytes.is_empty() {
        let Some((len, rest)) = bytes.split_first_chunk::<4>() else {
            return Err(CliError::invalid("truncated record length"));
        };
        let len = u32::from_le_bytes(*len) as usize;
        if rest.len() < len {
            return Err(CliError::invalid(format!(
                "record {} claims {len} bytes, {} left",
                leaves.len(),
                rest.len()
            )));
        }
        let (payload, rest) = rest.split_at(len);
        leaves.push(payload.to_vec());
        bytes = rest;
    }
    Ok(leaves)
}

fn decode_hex_leaves(bytes: &[u8]) -> CliResult<Vec<Vec<u8>>> {
    let text =
        std::str::from_utf8(bytes).map_err(|_| CliError::invalid("hex leaf file is not UTF-8"))?;
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            if line.bytes().any(|b| b.is_ascii_uppercase()) {
                return Err(CliError::invalid(format!(
                    "line {}: hex must be lowercase",
                    i + 1
                )));
            }
            hex::decode(line).map_err(|e| CliError::invalid(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

pub fn encode_bin_leaves<L: AsRef<[u8]>>(leaves: &[L]) -> Vec<u8> {
    let mut out = Vec::new();
    for leaf in leaves {
        let leaf = leaf.as_ref();
        let len = u32::try_from(leaf.len()).expect("leaf longer than 4 GiB");
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(leaf);
    }
    out
}

pub fn encode_hex_leaves<L: AsRef<[u8]>>(leaves: &[L]) -> String {
    leaves.iter().map(|l| hex::encode(l) + "\n").collect()
}

pub fn digest_hex(d: &Digest32) -> String {
    hex::encode(d.0)
}

pub fn parse_digest(s: &str) -> CliResult<Digest32> {
    if s.len() != 64 || !s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
        return Err(CliError::invalid(format!(
            "digest must be 64 lowercase hex characters, got {s:?}"
        )));
    }
    let mut out = [0u8; 32];
    hex::decode_to_slice(s, &mut out).expect("validated above");
    Ok(Digest32(out))
}

/// Parses `6,8` into batch sizes.
pub fn parse_batches(s: &str) -> CliResult<Vec<usize>> {
    s.split(',')
        .map(|part| match part.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::invalid(format!(
                "batch sizes must be positive integers, got {part:?}"
            ))),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub id: BatchId,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchManifest {
    pub hash_name: String,
    pub batches: Vec<ManifestEntry>,
}

impl BatchManifest {
    /// Reads a manifest; relative leaf paths resolve against its directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let mut manifest: BatchManifest = read_json(path)?;
        manifest.validate()?;
        let base = path.parent().unwrap_or(Path::new(""));
        for entry in &mut manifest.batches {
            if entry.path.is_relative() {
                entry.path = base.join(&entry.path);
            }
        }
        Ok(manifest)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.hash_name != SUPPORTED_HASH {
            return Err(CliError::invalid(format!(
                "unsupported hash {:?}, only {SUPPORTED_HASH:?} is available",
                self.hash_name
            )));
        }
        if self.batches.is_empty() {
            return Err(CliError::invalid("manifest lists no batches"));
        }
        for (i, entry) in self.batches.iter().enumerate() {
            if entry.id as usize != i {
                return Err(CliError::invalid(format!(
                    "manifest batch ids must be 0..B in order; entry {i} has id {}",
                    entry.id
                )));
            }
        }
        Ok(())
    }

    /// Reads every batch's leaves and derives the plan from their counts.
    pub fn load_batches(&self, format: LeafFormat) -> CliResult<(TreePlan, Vec<Vec<Vec<u8>>>)> {
        let batches = self
            .batches
            .iter()
            .map(|e| read_leaves(&e.path, format))
            .collect::<CliResult<Vec<_>>>()?;
        let sizes: Vec<usize> = batches.iter().map(Vec::len).collect();
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(CliError::invalid(format!("batch {i} has no leaves")));
        }
        Ok((plan_tree(&sizes)?, batches))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSpec {
    pub batch_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointRecord {
    pub level: u32,
    pub index: usize,
    pub order: u8,
    pub batch: BatchId,
    pub hash: String,
}

/// Persisted [`BatchResult`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointFile {
    pub version: u32,
    pub plan: PlanSpec,
    pub batch_id: BatchId,
    pub nodes_computed: usize,
    pub leaf_count: usize,
    pub checkpoints: Vec<CheckpointRecord>,
}

impl CheckpointFile {
    pub fn from_result(plan: &TreePlan, result: &BatchResult) -> Self {
        CheckpointFile {
            version: CHECKPOINT_FILE_VERSION,
            plan: PlanSpec {
                batch_sizes: plan.batch_sizes().to_vec(),
            },
            batch_id: result.batch_id,
            nodes_computed: result.nodes_computed,
            leaf_count: result.leaf_count,
            checkpoints: result
                .checkpoints
                .iter()
                .map(|n| CheckpointRecord {
                    level: n.position.level,
                    index: n.position.index,
                    order: n.order.bit(),
                    batch: n.batch,
                    hash: digest_hex(&n.data.expect("checkpoints carry data")),
                })
                .collect(),
        }
    }

    /// Decodes and checks the file against its own plan.
    pub fn to_result(&self) -> CliResult<(TreePlan, BatchResult)> {
        if self.version != CHECKPOINT_FILE_VERSION {
            return Err(CliError::invalid(format!(
                "unsupported checkpoint file version {}",
                self.version
            )));
        }
        let plan = plan_tree(&self.plan.batch_sizes)?;
        let range = plan.batch_range(self.batch_id)?;
        if self.leaf_count != range.len() {
            return Err(CliError::invalid(format!(
                "leaf_count {} does not match planned size {}",
                self.leaf_count,
                range.len()
            )));
        }
        let mut checkpoints = Vec::with_capacity(self.checkpoints.len());
        for rec in &self.checkpoints {
            let order = Order::from_bit(rec.order).ok_or_else(|| {
                CliError::invalid(format!("order must be 0 or 1, got {}", rec.order))
            })?;
            if rec.batch != self.batch_id {
                return Err(CliError::invalid(format!(
                    "checkpoint tagged with batch {} inside file for batch {}",
                    rec.batch, self.batch_id
                )));
            }
            checkpoints.push(Node {
                position: Position::new(rec.level, rec.index),
                batch: rec.batch,
                order,
                kind: NodeKind::LayerCheckpoint,
                data: Some(parse_digest(&rec.hash)?),
            });
        }
        let expected = checkpoint_positions(&plan, self.batch_id)?;
        let actual: Vec<Position> = checkpoints.iter().map(|n| n.position).collect();
        if actual != expected {
            return Err(CliError::invalid(format!(
                "checkpoints for batch {} do not match the plan geometry",
                self.batch_id
            )));
        }
        if checkpoints
            .iter()
            .any(|n| n.order != plan.order_of(n.position))
        {
            return Err(CliError::invalid(
                "checkpoint order bit disagrees with its position",
            ));
        }
        let result = BatchResult {
            batch_id: self.batch_id,
            plan_fingerprint: plan.fingerprint(),
            checkpoints,
            nodes_computed: self.nodes_computed,
            leaf_count: self.leaf_count,
        };
        Ok((plan, result))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideJson {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum StepJson {
    Pair { sibling: String, side: SideJson },
    Promote,
}

/// Persisted [`InclusionProof`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofFile {
    pub leaf_index: usize,
    pub steps: Vec<StepJson>,
}

impl From<&InclusionProof> for ProofFile {
    fn from(proof: &InclusionProof) -> Self {
        let steps = proof
            .steps
            .iter()
            .map(|s| match *s {
                ProofStep::Pair {
                    sibling,
                    sibling_side,
                } => StepJson::Pair {
                    sibling: digest_hex(&sibling),
                    side: match sibling_side {
                        Side::Left => SideJson::Left,
                        Side::Right => SideJson::Right,
                    },
                },
                ProofStep::Promote => StepJson::Promote,
            })
            .collect();
        ProofFile {
            leaf_index: proof.leaf_index,
            steps,
        }
    }
}

impl ProofFile {
    pub fn to_proof(&self) -> CliResult<InclusionProof> {
        let steps = self
            .steps
            .iter()
            .map(|s| {
                Ok(match s {
                    StepJson::Pair { sibling, side } => ProofStep::Pair {
                        sibling: parse_digest(sibling)?,
                        sibling_side: match side {
                            SideJson::Left => Side::Left,
                            SideJson::Right => Side::Right,
                        },
                    },
                    StepJson::Promote => ProofStep::Promote,
                })
            })
            .collect::<CliResult<_>>()?;
        Ok(InclusionProof {
            leaf_index: self.leaf_index,
            steps,
        })
    }
}
