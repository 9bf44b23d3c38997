//! One function per subcommand.

use std::path::Path;
use std::time::Instant;

use amt_core::{
    build_batch, checkpoint_positions, classic_build, commit, digest_placeholder_count,
    full_sync_internal_count, plan_tree, prove_inclusion, verify_inclusion, BatchId, BatchResult,
    TreePlan,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::formats::{
    digest_hex, parse_digest, read_json, to_json_line, write_file, BatchManifest, CheckpointFile,
    LeafFormat, ProofFile,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatchPlanReport {
    pub id: BatchId,
    pub leaves: usize,
    pub offset: usize,
    pub digest_placeholders: usize,
    /// `[level, index]` pairs, left to right.
    pub checkpoints: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanReport {
    pub total_leaves: usize,
    pub height: u32,
    pub level_widths: Vec<usize>,
    pub batches: Vec<BatchPlanReport>,
    pub full_sync_internal_count: usize,
}

pub fn plan(batch_sizes: &[usize]) -> CliResult<PlanReport> {
    let plan = plan_tree(batch_sizes)?;
    let batches = (0..plan.batch_count() as BatchId)
        .map(|b| {
            Ok(BatchPlanReport {
                id: b,
                leaves: plan.batch_sizes()[b as usize],
                offset: plan.batch_offsets()[b as usize],
                digest_placeholders: digest_placeholder_count(&plan, b)?,
                checkpoints: checkpoint_positions(&plan, b)?
                    .into_iter()
                    .map(|p| [p.level as usize, p.index])
                    .collect(),
            })
        })
        .collect::<CliResult<_>>()?;
    Ok(PlanReport {
        total_leaves: plan.total_leaves(),
        height: plan.height(),
        level_widths: plan.level_widths().to_vec(),
        batches,
        full_sync_internal_count: full_sync_internal_count(&plan),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BuildReport {
    pub root: String,
    pub hash_ops: usize,
}

pub fn build(leaves: &[Vec<u8>]) -> CliResult<BuildReport> {
    let tree = classic_build(leaves)?;
    Ok(BuildReport {
        root: digest_hex(&tree.root()),
        hash_ops: tree.hash_ops(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BuildBatchReport {
    pub batch_id: BatchId,
    pub nodes_computed: usize,
    pub checkpoint_count: usize,
}

/// Builds one batch named in the manifest and writes its checkpoint file.
pub fn build_batch_file(
    manifest: &Path,
    batch_id: BatchId,
    out: &Path,
    format: LeafFormat,
) -> CliResult<BuildBatchReport> {
    let manifest = BatchManifest::load(manifest)?;
    let (plan, batches) = manifest.load_batches(format)?;
    let leaves = batches.get(batch_id as usize).ok_or_else(|| {
        CliError::invalid(format!(
            "batch id {batch_id} not in manifest (has {} batches)",
            batches.len()
        ))
    })?;
    let result = build_batch(&plan, batch_id, leaves)?;
    let file = CheckpointFile::from_result(&plan, &result);
    write_file(out, to_json_line(&file).as_bytes())?;
    Ok(BuildBatchReport {
        batch_id,
        nodes_computed: result.nodes_computed,
        checkpoint_count: result.checkpoints.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommitReport {
    pub root: String,
    pub pair_hashes: usize,
    pub promotions: usize,
    pub checkpoint_count: usize,
}

pub fn commit_files<P: AsRef<Path>>(paths: &[P]) -> CliResult<CommitReport> {
    let mut plan: Option<TreePlan> = None;
    let mut results = Vec::with_capacity(paths.len());
    for path in paths {
        let file: CheckpointFile = read_json(path.as_ref())?;
        let (file_plan, result) = file.to_result()?;
        match &plan {
            None => plan = Some(file_plan),
            Some(p) if *p != file_plan => {
                return Err(CliError::invalid(format!(
                    "{} was built for plan {:?}, expected {:?}",
                    path.as_ref().display(),
                    file_plan.batch_sizes(),
                    p.batch_sizes()
                )))
            }
            Some(_) => {}
        }
        results.push(result);
    }
    let plan = plan.ok_or_else(|| CliError::invalid("no checkpoint files given"))?;
    Ok(commit_results(&plan, &results)?)
}

fn commit_results(plan: &TreePlan, results: &[BatchResult]) -> amt_core::Result<CommitReport> {
    let outcome = commit(plan, results)?;
    Ok(CommitReport {
        root: digest_hex(&outcome.root),
        pair_hashes: outcome.pair_hashes,
        promotions: outcome.promotions,
        checkpoint_count: outcome.checkpoint_count,
    })
}

pub fn prove(leaves: &[Vec<u8>], index: usize) -> CliResult<ProofFile> {
    let tree = classic_build(leaves)?;
    let proof = prove_inclusion(&tree, index)?;
    Ok(ProofFile::from(&proof))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub valid: bool,
}

/// `Ok` only when the proof verifies; a well-formed but wrong proof is
/// [`CliError::VerificationFailed`].
pub fn verify(root_hex: &str, leaf: &[u8], proof: &ProofFile) -> CliResult<VerifyReport> {
    let root = parse_digest(root_hex)?;
    let proof = proof.to_proof()?;
    if verify_inclusion(&root, leaf, &proof) {
        Ok(VerifyReport { valid: true })
    } else {
        Err(CliError::VerificationFailed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AmtBench {
    pub per_batch_nodes_computed: Vec<usize>,
    pub commit_pair_hashes: usize,
    pub commit_promotions: usize,
    /// Checkpoints held in memory between the batch builds and the commit.
    pub peak_checkpoint_count: usize,
    pub root: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassicBench {
    pub hash_ops: usize,
    pub root: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WallTimes {
    pub amt_batches_ms: f64,
    pub amt_commit_ms: f64,
    pub classic_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub amt: AmtBench,
    pub classic: ClassicBench,
    pub wall_times: WallTimes,
}

/// Leaves of random length 0..=64 drawn from a ChaCha8 stream seeded by `seed`.
pub fn bench_leaves(n: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(0..=64);
            let mut leaf = vec![0u8; len];
            rng.fill(&mut leaf[..]);
            leaf
        })
        .collect()
}

/// Builds the same pseudo-random tree both ways and reports the work done.
///
/// Batches are built in parallel and handed to the commit in `build_order`
/// (default: ascending ids).
pub fn bench(
    batch_sizes: &[usize],
    seed: u64,
    build_order: Option<&[BatchId]>,
) -> CliResult<BenchReport> {
    let plan = plan_tree(batch_sizes)?;
    let leaves = bench_leaves(plan.total_leaves(), seed);
    let order: Vec<BatchId> = match build_order {
        Some(order) => {
            let mut sorted = order.to_vec();
            sorted.sort_unstable();
            if sorted.iter().copied().ne(0..plan.batch_count() as BatchId) {
                return Err(CliError::invalid(format!(
                    "build order must be a permutation of 0..{}",
                    plan.batch_count()
                )));
            }
            order.to_vec()
        }
        None => (0..plan.batch_count() as BatchId).collect(),
    };

    let started = Instant::now();
    let results: Vec<BatchResult> = order
        .par_iter()
        .map(|&b| {
            let range = plan.batch_range(b)?;
            build_batch(&plan, b, &leaves[range])
        })
        .collect::<amt_core::Result<_>>()?;
    let amt_batches = started.elapsed();

    let started = Instant::now();
    let outcome = commit(&plan, &results)?;
    let amt_commit = started.elapsed();

    let started = Instant::now();
    let tree = classic_build(&leaves)?;
    let classic = started.elapsed();

    let mut per_batch = vec![0; plan.batch_count()];
    for r in &results {
        per_batch[r.batch_id as usize] = r.nodes_computed;
    }
    Ok(BenchReport {
        amt: AmtBench {
            per_batch_nodes_computed: per_batch,
            commit_pair_hashes: outcome.pair_hashes,
            commit_promotions: outcome.promotions,
            peak_checkpoint_count: outcome.checkpoint_count,
            root: digest_hex(&outcome.root),
        },
        classic: ClassicBench {
            hash_ops: tree.hash_ops(),
            root: digest_hex(&tree.root()),
        },
        wall_times: WallTimes {
            amt_batches_ms: amt_batches.as_secs_f64() * 1e3,
            amt_commit_ms: amt_commit.as_secs_f64() * 1e3,
            classic_ms: classic.as_secs_f64() * 1e3,
        },
    })
}
