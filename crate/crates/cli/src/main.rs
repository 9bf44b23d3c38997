use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use amt_cli::commands;
use amt_cli::formats::{
    self, parse_batches, read_json, read_leaves, to_json_line, LeafFormat, ProofFile,
};
use amt_cli::{CliError, CliResult};
use clap::{Parser, Subcommand};

/// Asynchronous Merkle tree tool.
#[derive(Debug, Parser)]
#[command(name = "amt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print tree geometry and per-batch checkpoint positions.
    Plan {
        /// Comma-separated batch sizes, e.g. 6,8.
        #[arg(long)]
        batches: String,
    },
    /// Build the whole tree at once and print its root.
    Build {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: LeafFormat,
    },
    /// Build one batch from a manifest and write its checkpoint file.
    BuildBatch {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        batch_id: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: LeafFormat,
    },
    /// Fold checkpoint files from every batch into the root.
    Commit {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Emit an inclusion proof for one leaf.
    Prove {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        index: usize,
        #[arg(long, value_enum, default_value_t)]
        format: LeafFormat,
        /// Write the proof here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an inclusion proof; exits 2 if it does not verify.
    Verify {
        #[arg(long)]
        root: String,
        /// Leaf file holding the leaf record.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        proof: PathBuf,
        /// Record to take from --input; required unless it holds exactly one.
        #[arg(long)]
        index: Option<usize>,
        #[arg(long, value_enum, default_value_t)]
        format: LeafFormat,
    },
    /// Compare the asynchronous build with a full rebuild on seeded data.
    Bench {
        #[arg(long)]
        batches: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated order in which batch results reach the commit.
        #[arg(long)]
        build_order: Option<String>,
    },
}

fn run(command: Command) -> CliResult<String> {
    Ok(match command {
        Command::Plan { batches } => to_json_line(&commands::plan(&parse_batches(&batches)?)?),
        Command::Build { input, format } => {
            to_json_line(&commands::build(&read_leaves(&input, format)?)?)
        }
        Command::BuildBatch {
            manifest,
            batch_id,
            out,
            format,
        } => to_json_line(&commands::build_batch_file(
            &manifest, batch_id, &out, format,
        )?),
        Command::Commit { files } => to_json_line(&commands::commit_files(&files)?),
        Command::Prove {
            input,
            index,
            format,
            out,
        } => {
            let proof = to_json_line(&commands::prove(&read_leaves(&input, format)?, index)?);
            match out {
                Some(path) => {
                    formats::write_file(&path, proof.as_bytes())?;
                    String::new()
                }
                None => proof,
            }
        }
        Command::Verify {
            root,
            input,
            proof,
            index,
            format,
        } => {
            let proof: ProofFile = read_json(&proof)?;
            let mut leaves = read_leaves(&input, format)?;
            let leaf = match index {
                Some(i) if i < leaves.len() => leaves.swap_remove(i),
                Some(i) => {
                    return Err(CliError::invalid(format!(
                        "index {i} out of range for {} records",
                        leaves.len()
                    )))
                }
                None if leaves.len() == 1 => leaves.pop().expect("one record"),
                None => {
                    return Err(CliError::invalid(
                        "--input must hold exactly one record unless --index is given",
                    ))
                }
            };
            match commands::verify(&root, &leaf, &proof) {
                Err(CliError::VerificationFailed) => {
                    print!("{}", to_json_line(&commands::VerifyReport { valid: false }));
                    return Err(CliError::VerificationFailed);
                }
                other => to_json_line(&other?),
            }
        }
        Command::Bench {
            batches,
            seed,
            build_order,
        } => {
            let order = build_order
                .map(|s| {
                    s.split(',')
                        .map(|p| {
                            p.trim()
                                .parse::<u32>()
                                .map_err(|_| CliError::invalid(format!("bad batch id {p:?}")))
                        })
                        .collect::<CliResult<Vec<_>>>()
                })
                .transpose()?;
            to_json_line(&commands::bench(
                &parse_batches(&batches)?,
                seed,
                order.as_deref(),
            )?)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
