use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WdsError};

/// Row-stochastic confusion matrix: `rows[i][j]` is the probability that a
/// signal of class `i` is labelled `j`. Stands in for a trained classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ConfusionMatrix {
    /// Normalises each row of raw counts or weights.
    pub fn new(classes: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = classes.len();
        if n == 0 || rows.len() != n {
            return Err(WdsError::LengthMismatch {
                expected: n,
                actual: rows.len(),
            });
        }
        let mut out = Vec::with_capacity(n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(WdsError::LengthMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            if row.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(WdsError::OutOfRange(format!("row {i} has a negative or non-finite entry")));
            }
            let total: f64 = row.iter().sum();
            if total <= 0.0 {
                return Err(WdsError::OutOfRange(format!("row {i} is all zero")));
            }
            out.push(row.iter().map(|v| v / total).collect());
        }
        Ok(ConfusionMatrix { classes, rows: out })
    }

    /// A classifier that always answers correctly.
    pub fn perfect(classes: Vec<String>) -> Self {
        let n = classes.len();
        let rows = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
        ConfusionMatrix { classes, rows }
    }

    /// A classifier that guesses uniformly.
    pub fn uniform(classes: Vec<String>) -> Self {
        let n = classes.len();
        let rows = vec![vec![1.0 / n as f64; n]; n];
        ConfusionMatrix { classes, rows }
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    /// Draws the label assigned to a signal of class `truth`.
    pub fn sample<R: Rng + ?Sized>(&self, truth: usize, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (j, p) in self.rows[truth].iter().enumerate() {
            acc += p;
            if u < acc {
                return j;
            }
        }
        self.rows[truth].iter().rposition(|&p| p > 0.0).unwrap_or(truth)
    }

    /// Expected accuracy, the mean of the diagonal.
    pub fn expected_sca(&self) -> f64 {
        (0..self.n_classes()).map(|i| self.rows[i][i]).sum::<f64>() / self.n_classes() as f64
    }
}

/// Replays `trials_per_class` classifications per class and returns the hit
/// and trial counters.
pub fn replay_sca(cm: &ConfusionMatrix, trials_per_class: u64, seed: u64) -> (Vec<u64>, Vec<u64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..cm.n_classes())
        .map(|c| (0..trials_per_class).filter(|_| cm.sample(c, &mut rng) == c).count() as u64)
        .collect();
    (hits, vec![trials_per_class; cm.n_classes()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::sca;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    #[test]
    fn perfect_classifier_scores_one() {
        let (h, t) = replay_sca(&ConfusionMatrix::perfect(names(4)), 50, 1);
        assert_eq!(sca(&h, &t).unwrap(), 1.0);
    }

    #[test]
    fn uniform_guessing_scores_chance() {
        for n in [3usize, 7] {
            let (h, t) = replay_sca(&ConfusionMatrix::uniform(names(n)), 20_000, 2);
            let s = sca(&h, &t).unwrap();
            assert!((s - 1.0 / n as f64).abs() < 0.01, "{n}: {s}");
        }
    }

    #[test]
    fn rows_are_normalised() {
        let cm = ConfusionMatrix::new(names(2), vec![vec![3.0, 1.0], vec![0.0, 2.0]]).unwrap();
        assert_eq!(cm.rows[0], vec![0.75, 0.25]);
        assert_eq!(cm.expected_sca(), 0.875);
        assert!(ConfusionMatrix::new(names(2), vec![vec![0.0, 0.0], vec![1.0, 0.0]]).is_err());
        assert!(ConfusionMatrix::new(names(2), vec![vec![1.0]]).is_err());
    }
}
