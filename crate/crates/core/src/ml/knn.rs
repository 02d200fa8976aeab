use serde::{Deserialize, Serialize};

use super::argmax_votes;
use super::dataset::N_FEATURES;

/// k-nearest neighbours by Euclidean distance over the stored (scaled)
/// training set. Equal distances are ordered by training index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    pub k: usize,
    pub x: Vec<[f64; N_FEATURES]>,
    pub y: Vec<usize>,
    pub n_classes: usize,
}

impl Knn {
    pub fn fit(x: &[[f64; N_FEATURES]], y: &[usize], n_classes: usize, k: usize) -> Self {
        Knn {
            k,
            x: x.to_vec(),
            y: y.to_vec(),
            n_classes,
        }
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        let mut dist: Vec<(f64, usize)> = self
            .x
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(row).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut votes = vec![0usize; self.n_classes];
        for &(_, i) in dist.iter().take(self.k) {
            votes[self.y[i]] += 1;
        }
        argmax_votes(&votes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(v: f64) -> [f64; N_FEATURES] {
        let mut r = [0.0; N_FEATURES];
        r[5] = v;
        r
    }

    #[test]
    fn majority_of_nearest() {
        let x = [at(0.0), at(1.0), at(2.0), at(10.0), at(11.0)];
        let knn = Knn::fit(&x, &[1, 1, 0, 3, 3], 4, 3);
        assert_eq!(knn.predict(&at(0.5)), 1);
        assert_eq!(knn.predict(&at(12.0)), 3);
        let one = Knn::fit(&x, &[1, 1, 0, 3, 3], 4, 1);
        assert_eq!(one.predict(&at(2.1)), 0);
    }

    #[test]
    fn equal_votes_go_to_lower_class() {
        let knn = Knn::fit(&[at(-1.0), at(1.0)], &[2, 1], 4, 2);
        assert_eq!(knn.predict(&at(0.0)), 1);
    }
}
