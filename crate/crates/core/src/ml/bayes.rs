use serde::{Deserialize, Serialize};

use super::dataset::N_FEATURES;

/// Gaussian naive Bayes. Variances get `var_smoothing` times the largest
/// feature variance added, as a floor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    /// Class priors; zero for classes absent from training.
    pub priors: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
}

impl NaiveBayes {
    pub fn fit(x: &[[f64; N_FEATURES]], y: &[usize], n_classes: usize, var_smoothing: f64) -> Self {
        let n = x.len() as f64;
        let mut counts = vec![0usize; n_classes];
        let mut means = vec![vec![0.0; N_FEATURES]; n_classes];
        let mut variances = vec![vec![0.0; N_FEATURES]; n_classes];
        for (row, &c) in x.iter().zip(y) {
            counts[c] += 1;
            for j in 0..N_FEATURES {
                means[c][j] += row[j];
            }
        }
        for c in 0..n_classes {
            if counts[c] > 0 {
                means[c].iter_mut().for_each(|m| *m /= counts[c] as f64);
            }
        }
        for (row, &c) in x.iter().zip(y) {
            for j in 0..N_FEATURES {
                variances[c][j] += (row[j] - means[c][j]).powi(2);
            }
        }
        let mut max_var: f64 = 0.0;
        for j in 0..N_FEATURES {
            let mean = x.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = x.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
            max_var = max_var.max(var);
        }
        // all-constant data still needs a positive variance
        let epsilon = (var_smoothing * max_var).max(f64::MIN_POSITIVE);
        for c in 0..n_classes {
            for v in &mut variances[c] {
                if counts[c] > 0 {
                    *v /= counts[c] as f64;
                }
                *v += epsilon;
            }
        }
        let priors = counts.iter().map(|&k| k as f64 / n).collect();
        NaiveBayes {
            priors,
            means,
            variances,
        }
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        // a class seen in training wins even if every likelihood underflows
        let mut best = self.priors.iter().position(|&p| p > 0.0).unwrap_or(0);
        let mut best_score = f64::NEG_INFINITY;
        for (c, &prior) in self.priors.iter().enumerate() {
            if prior <= 0.0 {
                continue;
            }
            let mut score = prior.ln();
            for j in 0..N_FEATURES {
                let var = self.variances[c][j];
                let d = row[j] - self.means[c][j];
                score -= 0.5 * ((2.0 * std::f64::consts::PI * var).ln() + d * d / var);
            }
            if score > best_score {
                best = c;
                best_score = score;
            }
        }
        best
    }
}
