use std::collections::HashMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;
use reorder_core::cost::{etree_column_counts, label_from_timings, proxy_label_with_costs, read_timings};
use reorder_core::features::{bandwidth, extract_features, profile};
use reorder_core::ml::{
    evaluate, grid_search, load_model, parse_grid, read_dataset_csv, save_model, train_classifier,
    train_test_split, write_dataset_csv, Dataset, FeatureRow, Params,
};
use reorder_core::mm::{default_cache_dir, read_matrix_market, write_matrix_market_file, Fetcher};
use reorder_core::ordering::order_graph;
use reorder_core::report::{build_report, read_predictions, write_predictions};
use reorder_core::synth::{synthetic_corpus, CorpusConfig, Family};
use reorder_core::{OrderingLabel, Permutation, PredictionRecord};

use crate::{Cli, Command, Common, DatasetCommand};

/// Some inputs of a batch failed; each failure was already printed.
#[derive(Debug)]
struct BatchFailed(usize);

impl fmt::Display for BatchFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} input(s) could not be processed", self.0)
    }
}

impl std::error::Error for BatchFailed {}

/// 1 for configuration mistakes, 2 for anything wrong with the data.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<reorder_core::Error>() {
            return match err {
                reorder_core::Error::Config(_) => 1,
                _ => 2,
            };
        }
    }
    2
}

pub fn run(cli: Cli) -> Result<()> {
    let common = cli.common;
    match cli.command {
        Command::Fetch { matrices } => fetch(&common, &matrices),
        Command::Features { input, output } => features(&common, &input, output.as_deref()),
        Command::Reorder {
            matrix,
            method,
            output,
            perm_out,
        } => reorder(&common, &matrix, method, output.as_deref(), perm_out.as_deref()),
        Command::Label {
            features,
            matrices,
            timings,
            costs,
            output,
        } => match (matrices, timings) {
            (Some(dir), _) => label_proxy(&features, &dir, costs.as_deref(), output.as_deref()),
            (None, Some(t)) => label_timings(&features, &t, output.as_deref()),
            (None, None) => Err(reorder_core::Error::Config("give --matrices or --timings".into()).into()),
        },
        Command::Dataset(DatasetCommand::Split {
            dataset,
            ratio,
            train_out,
            test_out,
        }) => split(&common, &dataset, ratio, &train_out, &test_out),
        Command::Dataset(DatasetCommand::Synth {
            count,
            min_n,
            max_n,
            scramble,
            families,
            out_dir,
        }) => {
            let cfg = CorpusConfig {
                count,
                min_n,
                max_n,
                scramble,
                families: if families.is_empty() { Family::ALL.to_vec() } else { families },
            };
            synth(&common, &cfg, &out_dir)
        }
        Command::Train {
            dataset,
            algorithm,
            scaler,
            grid,
            folds,
            output,
        } => {
            let grid = match grid {
                Some(spec) => parse_grid(&spec)?,
                None => algorithm.default_grid(),
            };
            let d = load_dataset(&dataset)?;
            let result = grid_search(&d, algorithm, scaler, &grid, folds, common.seed)?;
            let mut out = io::stdout().lock();
            writeln!(out, "{:<48} {:>9}  folds", "hyperparameters", "mean acc")?;
            for (params, score) in &result.table {
                let folds: Vec<String> = score.fold_accuracies.iter().map(|a| format!("{a:.2}")).collect();
                writeln!(out, "{:<48} {:>8.2}%  {}", fmt_params(params), score.mean_accuracy, folds.join(" "))?;
            }
            let model = train_classifier(&d, algorithm, scaler, &result.best, common.seed)?;
            for w in &model.warnings {
                log::warn!("{w}");
            }
            save_model(&model, &output).with_context(|| format!("writing {}", output.display()))?;
            writeln!(
                out,
                "best: {} ({:.2}%), model written to {}",
                fmt_params(&result.best),
                result.best_score.mean_accuracy,
                output.display()
            )?;
            Ok(())
        }
        Command::Predict { model, inputs, output } => predict(&common, &model, &inputs, output.as_deref()),
        Command::Evaluate { model, dataset } => {
            let model = load_model(&model).with_context(|| format!("loading {}", model.display()))?;
            let d = load_dataset(&dataset)?;
            let r = evaluate(&model, &d)?;
            let mut out = io::stdout().lock();
            writeln!(out, "accuracy: {:.2}% ({} of {})", r.accuracy_percent, r.p_true, r.p_all)?;
            writeln!(out, "confusion (rows true, columns predicted):")?;
            write!(out, "{:>8}", "")?;
            for l in OrderingLabel::ALL {
                write!(out, "{:>8}", l.as_str())?;
            }
            writeln!(out)?;
            for (t, row) in r.confusion.iter().enumerate() {
                write!(out, "{:>8}", OrderingLabel::ALL[t].as_str())?;
                for c in row {
                    write!(out, "{c:>8}")?;
                }
                writeln!(out)?;
            }
            Ok(())
        }
        Command::Report {
            timings,
            predictions,
            csv,
        } => {
            let t = read_timings(open(&timings)?).with_context(|| format!("reading {}", timings.display()))?;
            let p = read_predictions(open(&predictions)?).with_context(|| format!("reading {}", predictions.display()))?;
            let summary = build_report(&t, &p)?;
            print!("{}", summary.render());
            if let Some(path) = csv {
                summary.write_csv(create(&path)?)?;
            }
            Ok(())
        }
    }
}

fn fetch(common: &Common, matrices: &[String]) -> Result<()> {
    let cache = common.cache.clone().unwrap_or_else(default_cache_dir);
    let fetcher = Fetcher::new(cache);
    for spec in matrices {
        let (group, name) = spec
            .split_once('/')
            .filter(|(g, n)| !g.is_empty() && !n.is_empty() && !n.contains('/'))
            .ok_or_else(|| reorder_core::Error::Config(format!("`{spec}` is not GROUP/NAME")))?;
        let path = fetcher.fetch(group, name)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn features(common: &Common, input: &Path, output: Option<&Path>) -> Result<()> {
    let files = matrix_files(std::slice::from_ref(&input.to_path_buf()))?;
    let results: Vec<_> = files
        .par_iter()
        .map(|path| -> Result<FeatureRow> {
            let m = read_matrix_market(path)?;
            Ok(FeatureRow::new(matrix_name(path), &extract_features(&m)?))
        })
        .collect();
    let (rows, failed) = keep_good(common, &files, results);
    write_dataset_csv(sink(output)?, &rows)?;
    batch_result(failed)
}

fn reorder(
    common: &Common,
    path: &Path,
    method: OrderingLabel,
    output: Option<&Path>,
    perm_out: Option<&Path>,
) -> Result<()> {
    let m = read_matrix_market(path).with_context(|| format!("reading {}", path.display()))?;
    let g = m.symmetrize()?;
    let start = Instant::now();
    let p = order_graph(&g, method);
    let seconds = start.elapsed().as_secs_f64();
    let permuted = m.permute(&p)?;
    let before = etree_column_counts(&g, &Permutation::identity(g.n()))?;
    let after = etree_column_counts(&g, &p)?;

    let mut out = io::stdout().lock();
    writeln!(out, "{:<12} {:>14} {:>14}", "", "original", method.as_str())?;
    writeln!(out, "{:<12} {:>14} {:>14}", "bandwidth", bandwidth(&m)?, bandwidth(&permuted)?)?;
    writeln!(out, "{:<12} {:>14} {:>14}", "profile", profile(&m)?, profile(&permuted)?)?;
    let rows = [
        ("fill-in", before.fill_in, after.fill_in),
        ("factor nnz", before.factor_nnz, after.factor_nnz),
        ("flops", before.flops, after.flops),
    ];
    for (name, b, a) in rows {
        writeln!(out, "{name:<12} {b:>14} {a:>14}")?;
    }
    if !common.no_times {
        writeln!(out, "ordering time: {seconds:.6} s")?;
    }
    if let Some(dest) = output {
        write_matrix_market_file(&permuted, dest).with_context(|| format!("writing {}", dest.display()))?;
    }
    if let Some(dest) = perm_out {
        let mut w = create(dest)?;
        for v in p.as_slice() {
            writeln!(w, "{v}")?;
        }
        w.flush()?;
    }
    Ok(())
}

fn label_proxy(features: &Path, dir: &Path, costs: Option<&Path>, output: Option<&Path>) -> Result<()> {
    let mut rows = load_rows(features)?;
    let labelled = rows
        .par_iter()
        .map(|row| -> Result<_> {
            let path = dir.join(format!("{}.mtx", row.matrix));
            if !path.is_file() {
                return Err(reorder_core::Error::InvalidDataset(format!(
                    "no matrix file for `{}` (looked for {})",
                    row.matrix,
                    path.display()
                ))
                .into());
            }
            let m = read_matrix_market(&path).with_context(|| format!("reading {}", path.display()))?;
            Ok(proxy_label_with_costs(&m.symmetrize()?))
        })
        .collect::<Result<Vec<_>>>()?;
    for (row, (label, _)) in rows.iter_mut().zip(&labelled) {
        row.label = Some(*label);
    }
    if let Some(dest) = costs {
        let mut w = csv::Writer::from_writer(create(dest)?);
        let mut header = vec!["matrix".to_string()];
        for l in OrderingLabel::ALL {
            let l = l.as_str().to_ascii_lowercase();
            header.extend([format!("{l}_fill"), format!("{l}_nnz"), format!("{l}_flops")]);
        }
        header.push("label".into());
        w.write_record(&header)?;
        for (row, (label, reports)) in rows.iter().zip(&labelled) {
            let mut record = vec![row.matrix.clone()];
            for (_, c) in reports {
                record.extend([c.fill_in.to_string(), c.factor_nnz.to_string(), c.flops.to_string()]);
            }
            record.push(label.to_string());
            w.write_record(&record)?;
        }
        w.flush()?;
    }
    write_dataset_csv(sink(output)?, &rows)?;
    Ok(())
}

fn label_timings(features: &Path, timings: &Path, output: Option<&Path>) -> Result<()> {
    let mut rows = load_rows(features)?;
    let records = read_timings(open(timings)?).with_context(|| format!("reading {}", timings.display()))?;
    let by_name: HashMap<&str, _> = records.iter().map(|r| (r.matrix.as_str(), r)).collect();
    for row in &mut rows {
        let rec = by_name.get(row.matrix.as_str()).ok_or_else(|| {
            reorder_core::Error::InvalidDataset(format!("no timing row for `{}`", row.matrix))
        })?;
        row.label = Some(label_from_timings(rec)?);
    }
    write_dataset_csv(sink(output)?, &rows)?;
    Ok(())
}

fn split(common: &Common, dataset: &Path, ratio: f64, train_out: &Path, test_out: &Path) -> Result<()> {
    let d = load_dataset(dataset)?;
    let s = train_test_split(&d, ratio, common.seed)?;
    write_dataset_csv(create(train_out)?, &s.train.to_rows())?;
    write_dataset_csv(create(test_out)?, &s.test.to_rows())?;
    println!(
        "{} training rows, {} test rows{}",
        s.train.len(),
        s.test.len(),
        if s.stratified { " (stratified)" } else { "" }
    );
    Ok(())
}

fn synth(common: &Common, cfg: &CorpusConfig, out_dir: &Path) -> Result<()> {
    let corpus = synthetic_corpus(cfg, common.seed)?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    corpus.par_iter().try_for_each(|s| -> Result<()> {
        let path = out_dir.join(format!("{}.mtx", s.name));
        write_matrix_market_file(&s.matrix, &path).with_context(|| format!("writing {}", path.display()))
    })?;
    println!("{} matrices written to {}", corpus.len(), out_dir.display());
    Ok(())
}

fn predict(common: &Common, model: &Path, inputs: &[PathBuf], output: Option<&Path>) -> Result<()> {
    let model = load_model(model).with_context(|| format!("loading {}", model.display()))?;
    let files = matrix_files(inputs)?;
    let results: Vec<_> = files
        .par_iter()
        .map(|path| -> Result<PredictionRecord> {
            let start = Instant::now();
            let m = read_matrix_market(path)?;
            let p = model.predict_features(&extract_features(&m)?)?;
            Ok(PredictionRecord {
                matrix: matrix_name(path),
                label: p.label,
                seconds: Some(start.elapsed().as_secs_f64()),
            })
        })
        .collect();
    let (records, failed) = keep_good(common, &files, results);
    let mut out = io::stdout().lock();
    for r in &records {
        match (common.no_times, r.seconds) {
            (false, Some(s)) => writeln!(out, "{},{},{s:.6}", r.matrix, r.label)?,
            _ => writeln!(out, "{},{}", r.matrix, r.label)?,
        }
    }
    out.flush()?;
    if let Some(dest) = output {
        write_predictions(create(dest)?, &records, !common.no_times)?;
    }
    batch_result(failed)
}

/// Expands directories to their `.mtx` files in name order; plain files are
/// kept as given.
fn matrix_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found = Vec::new();
            for entry in fs::read_dir(input).with_context(|| format!("listing {}", input.display()))? {
                let path = entry?.path();
                if path.is_file() && path.extension().is_some_and(|e| e.eq_ignore_ascii_case("mtx")) {
                    found.push(path);
                }
            }
            found.sort();
            files.extend(found);
        } else if input.exists() {
            files.push(input.clone());
        } else {
            return Err(io::Error::new(io::ErrorKind::NotFound, format!("{} does not exist", input.display())).into());
        }
    }
    Ok(files)
}

/// Splits batch results into successes and a failure count, reporting each
/// failure on stderr (as a warning under `--skip-bad`).
fn keep_good<T>(common: &Common, files: &[PathBuf], results: Vec<Result<T>>) -> (Vec<T>, usize) {
    let mut good = Vec::with_capacity(results.len());
    let mut failed = 0;
    for (path, r) in files.iter().zip(results) {
        match r {
            Ok(v) => good.push(v),
            Err(e) if common.skip_bad => log::warn!("skipping {}: {e:#}", path.display()),
            Err(e) => {
                eprintln!("error: {}: {e:#}", path.display());
                failed += 1;
            }
        }
    }
    (good, failed)
}

fn batch_result(failed: usize) -> Result<()> {
    if failed == 0 {
        Ok(())
    } else {
        Err(BatchFailed(failed).into())
    }
}

fn matrix_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn fmt_params(p: &Params) -> String {
    let parts: Vec<String> = p.iter().map(|(k, v)| format!("{k}={v}")).collect();
    parts.join(" ")
}

fn load_rows(path: &Path) -> Result<Vec<FeatureRow>> {
    read_dataset_csv(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn load_dataset(path: &Path) -> Result<Dataset> {
    Dataset::from_rows(load_rows(path)?).with_context(|| format!("reading {}", path.display()))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("opening {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}
