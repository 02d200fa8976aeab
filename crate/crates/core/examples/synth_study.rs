//! Labels a synthetic corpus by proxy cost and reports how well a random
//! forest learns the labels.
//!
//! cargo run --release -p reorder-core --example synth_study -- [count] [seed]

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use reorder_core::cost::proxy_label;
use reorder_core::features::extract_features;
use reorder_core::ml::{evaluate, train_classifier, train_test_split, Algorithm, Dataset, Params, ScalerKind};
use reorder_core::synth::{synthetic_corpus, CorpusConfig};
use reorder_core::OrderingLabel;

fn main() -> reorder_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let count = args.next().map_or(400, |s| s.parse().expect("count"));
    let seed = args.next().map_or(42, |s| s.parse().expect("seed"));
    let start = Instant::now();
    let cfg = CorpusConfig {
        count,
        ..CorpusConfig::default()
    };
    let corpus = synthetic_corpus(&cfg, seed)?;
    let rows = corpus
        .par_iter()
        .map(|s| Ok((extract_features(&s.matrix)?.to_array(), proxy_label(&s.matrix)?)))
        .collect::<reorder_core::Result<Vec<_>>>()?;
    println!("generated and labelled {count} matrices in {:.1}s", start.elapsed().as_secs_f64());

    let mut by_family: BTreeMap<String, [usize; 4]> = BTreeMap::new();
    for (s, (_, label)) in corpus.iter().zip(&rows) {
        by_family.entry(s.family.to_string()).or_default()[label.index()] += 1;
    }
    println!("{:<8} {:>5} {:>5} {:>5} {:>7}", "family", "RCM", "AMD", "ND", "HYBRID");
    for (family, c) in &by_family {
        println!("{family:<8} {:>5} {:>5} {:>5} {:>7}", c[0], c[1], c[2], c[3]);
    }

    let d = Dataset::new(
        corpus.iter().map(|s| s.name.clone()).collect(),
        rows.iter().map(|r| r.0).collect(),
        rows.iter().map(|r| r.1).collect(),
    )?;
    let split = train_test_split(&d, 0.8, seed)?;
    let counts = split.test.class_counts();
    let majority = OrderingLabel::ALL
        .iter()
        .map(|l| 100.0 * counts[l.index()] as f64 / split.test.len() as f64)
        .fold(0.0, f64::max);
    let model = train_classifier(&split.train, Algorithm::RandomForest, ScalerKind::Standardization, &Params::new(), seed)?;
    let report = evaluate(&model, &split.test)?;
    println!(
        "test accuracy {:.2}% vs majority {:.2}% ({} test rows), total {:.1}s",
        report.accuracy_percent,
        majority,
        split.test.len(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
