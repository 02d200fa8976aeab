use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reorder_core::ml::{Algorithm, ScalerKind};
use reorder_core::OrderingLabel;

mod commands;

/// Learned selection of sparse matrix reordering algorithms.
#[derive(Debug, Parser)]
#[command(name = "reorder-advisor", version, about)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Seed for every random choice (splits, folds, forests, synthetic matrices).
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Matrix cache directory for `fetch` (default: $REORDER_ADVISOR_CACHE or the user cache dir).
    #[arg(long, global = true, value_name = "DIR")]
    cache: Option<PathBuf>,
    /// Report unreadable matrix files as warnings and carry on.
    #[arg(long, global = true)]
    skip_bad: bool,
    /// Leave wall-clock columns out of the output.
    #[arg(long, global = true)]
    no_times: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Download matrices from the SuiteSparse collection into the cache.
    Fetch {
        /// Matrices as GROUP/NAME, e.g. HB/bcsstk01.
        #[arg(required = true)]
        matrices: Vec<String>,
    },
    /// Extract the feature vector of a matrix file or of every .mtx file in a directory.
    Features {
        input: PathBuf,
        /// Write the feature CSV here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Reorder a matrix and report bandwidth, profile and factor cost before and after.
    Reorder {
        matrix: PathBuf,
        /// Ordering to apply: rcm, amd, nd or hybrid.
        #[arg(short, long, default_value = "amd")]
        method: OrderingLabel,
        /// Write the permuted matrix in Matrix Market format.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the permutation, one new index per line (perm[old] = new, 0-based).
        #[arg(long, value_name = "FILE")]
        perm_out: Option<PathBuf>,
    },
    /// Fill the label column of a feature CSV.
    Label {
        features: PathBuf,
        /// Label by symbolic factorization cost, reading NAME.mtx from this directory.
        #[arg(long, value_name = "DIR", conflicts_with = "timings", required_unless_present = "timings")]
        matrices: Option<PathBuf>,
        /// Label by measured solve times from a `matrix,rcm,amd,nd,scotch` CSV.
        #[arg(long, value_name = "CSV")]
        timings: Option<PathBuf>,
        /// Proxy mode: also write every ordering's fill and flops here.
        #[arg(long, value_name = "CSV", requires = "matrices")]
        costs: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Split a labelled dataset, or generate a synthetic matrix corpus.
    #[command(subcommand)]
    Dataset(DatasetCommand),
    /// Grid-search hyperparameters by k-fold cross-validation and fit the best model.
    Train {
        dataset: PathBuf,
        /// random_forest, decision_tree, knn or naive_bayes.
        #[arg(short, long, default_value = "random_forest")]
        algorithm: Algorithm,
        /// standard or minmax.
        #[arg(long, default_value = "standard")]
        scaler: ScalerKind,
        /// Candidate values as `key=v1,v2;key2=v3`; defaults to the algorithm's built-in grid.
        #[arg(long)]
        grid: Option<String>,
        /// Number of cross-validation folds.
        #[arg(short = 'k', long, default_value_t = 5)]
        folds: usize,
        /// Where to write the model file.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Predict the best ordering for matrix files or directories.
    Predict {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Also write the predictions as a CSV with a header.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Accuracy and confusion matrix of a model on a labelled dataset.
    Evaluate {
        #[arg(short, long)]
        model: PathBuf,
        dataset: PathBuf,
    },
    /// Compare solve times under predicted orderings against AMD.
    Report {
        #[arg(long, value_name = "CSV")]
        timings: PathBuf,
        #[arg(long, value_name = "CSV")]
        predictions: PathBuf,
        /// Also write per-matrix rows as CSV.
        #[arg(long, value_name = "CSV")]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum DatasetCommand {
    /// Stratified train/test split of a labelled CSV.
    Split {
        dataset: PathBuf,
        /// Share of rows that go to the training set.
        #[arg(long, default_value_t = 0.8)]
        ratio: f64,
        #[arg(long)]
        train_out: PathBuf,
        #[arg(long)]
        test_out: PathBuf,
    },
    /// Write a synthetic corpus of .mtx files.
    Synth {
        #[arg(long, default_value_t = 400)]
        count: usize,
        #[arg(long, default_value_t = 50)]
        min_n: usize,
        #[arg(long, default_value_t = 2000)]
        max_n: usize,
        /// Share of matrices whose numbering is randomly shuffled.
        #[arg(long, default_value_t = 0.0)]
        scramble: f64,
        /// Comma-separated subset of banded,grid2d,grid3d,random,tree,block.
        #[arg(long, value_delimiter = ',')]
        families: Vec<reorder_core::synth::Family>,
        #[arg(short, long)]
        out_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
