use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "arir", version, about = "Arabic stopword retrieval experiments")]
pub struct Cli {
    /// Experiment manifest of `key = value` lines; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index from TIPSTER SGML files (plain or gzip).
    Index(IndexArgs),
    /// Rank documents for TREC topics and write a run file.
    Search(SearchArgs),
    /// Evaluate a run against relevance judgments.
    Eval(EvalArgs),
    /// Friedman and Wilcoxon comparison of evaluated runs.
    Compare(CompareArgs),
    /// Build, combine or inspect stopword lists.
    #[command(subcommand)]
    Stoplist(StoplistCommand),
    /// Generate a seeded synthetic test collection.
    Synth(SynthArgs),
    /// Run all model and stoplist combinations end to end.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    /// Corpus files or directories.
    #[arg(long = "corpus", value_name = "PATH", num_args = 1..)]
    pub corpus: Vec<PathBuf>,
    /// Input encoding: utf8 or cp1256.
    #[arg(long)]
    pub encoding: Option<String>,
    /// none, GS, CBS, CS or a stoplist file.
    #[arg(long)]
    pub stoplist: Option<String>,
    /// Keep diacritics and tatweel instead of stripping them.
    #[arg(long)]
    pub keep_marks: bool,
    /// Worker threads for document analysis.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, value_name = "FILE")]
    pub index: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub topics: Option<PathBuf>,
    /// TFIDF, BM25 or KL.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub k1: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub k3: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Run tag; derived from model and stoplist when absent.
    #[arg(long)]
    pub tag: Option<String>,
    /// Input encoding of the topics file.
    #[arg(long)]
    pub encoding: Option<String>,
    /// Run file to write; standard output when absent.
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_name = "FILE")]
    pub run: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub qrels: Option<PathBuf>,
    /// Include a block for every query in the text report.
    #[arg(long)]
    pub per_query: bool,
    /// Also write the tab-separated report here.
    #[arg(long, value_name = "FILE")]
    pub tsv: Option<PathBuf>,
    /// Text report destination; standard output when absent.
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Tab-separated reports written by `eval --tsv`.
    #[arg(required = true, num_args = 2.., value_name = "REPORT")]
    pub reports: Vec<PathBuf>,
    /// Technique the others are tested against.
    #[arg(long)]
    pub baseline: Option<String>,
    /// Directory for tables.txt, friedman.tsv and wilcoxon.tsv.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum StoplistCommand {
    /// Words whose collection frequency exceeds a cutoff.
    Build {
        #[arg(long, value_name = "FILE")]
        index: PathBuf,
        #[arg(long)]
        cutoff: Option<u64>,
        /// Words never to include, one per line.
        #[arg(long, value_name = "FILE")]
        exclude: Option<PathBuf>,
        #[arg(long, default_value = "CBS")]
        name: String,
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
    },
    /// Union of two lists (GS, CBS, CS or files).
    Combine {
        first: String,
        second: String,
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
    },
    /// Size of a list and its overlap with another.
    Inspect {
        list: String,
        #[arg(long)]
        against: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 5000)]
    pub docs: usize,
    #[arg(long, default_value_t = 20)]
    pub queries: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long = "corpus", value_name = "PATH", num_args = 1..)]
    pub corpus: Vec<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub topics: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub qrels: Option<PathBuf>,
    #[arg(long)]
    pub encoding: Option<String>,
    #[arg(long)]
    pub top_k: Option<usize>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub baseline: Option<String>,
    /// Directory for indexes, runs, reports and tables.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}
