//! Linear-chain CRF for entity tagging. Scores are emission matrices
//! `[T, L]` plus a learned transition matrix `[L, L]`; inference runs in
//! log space.

use ndarray::Array2;

use crate::nn::Param;

/// CRF head with learned label-to-label transition scores.
#[derive(Debug, Clone)]
pub struct Crf {
    pub transitions: Param,
}

impl Crf {
    pub fn new(num_labels: usize) -> Self {
        Crf {
            transitions: Param::zeros(num_labels, num_labels),
        }
    }

    pub fn num_labels(&self) -> usize {
        self.transitions.value.nrows()
    }

    /// Unnormalized log score of one label path.
    pub fn path_score(&self, emissions: &Array2<f64>, labels: &[usize]) -> f64 {
        let mut score = 0.0;
        for (t, &y) in labels.iter().enumerate() {
            score += emissions[[t, y]];
            if t > 0 {
                score += self.transitions.value[[labels[t - 1], y]];
            }
        }
        score
    }

    /// Log of the sum of exp(path score) over all label paths.
    pub fn log_partition(&self, emissions: &Array2<f64>) -> f64 {
        let t_len = emissions.nrows();
        let l = self.num_labels();
        if t_len == 0 {
            return 0.0;
        }
        let mut alpha: Vec<f64> = (0..l).map(|j| emissions[[0, j]]).collect();
        for t in 1..t_len {
            let mut next = vec![0.0; l];
            for (j, slot) in next.iter_mut().enumerate() {
                let terms: Vec<f64> = (0..l)
                    .map(|i| alpha[i] + self.transitions.value[[i, j]])
                    .collect();
                *slot = log_sum_exp(&terms) + emissions[[t, j]];
            }
            alpha = next;
        }
        log_sum_exp(&alpha)
    }

    /// Highest-scoring label path. Ties break toward the lower label
    /// index, so decoding is fully deterministic.
    pub fn viterbi(&self, emissions: &Array2<f64>) -> Vec<usize> {
        let t_len = emissions.nrows();
        let l = self.num_labels();
        if t_len == 0 {
            return Vec::new();
        }
        let mut delta: Vec<f64> = (0..l).map(|j| emissions[[0, j]]).collect();
        let mut back: Vec<Vec<usize>> = Vec::with_capacity(t_len);
        for t in 1..t_len {
            let mut next = vec![f64::NEG_INFINITY; l];
            let mut ptr = vec![0usize; l];
            for j in 0..l {
                let mut best = f64::NEG_INFINITY;
                let mut best_i = 0;
                for (i, &d) in delta.iter().enumerate() {
                    let s = d + self.transitions.value[[i, j]];
                    if s > best {
                        best = s;
                        best_i = i;
                    }
                }
                next[j] = best + emissions[[t, j]];
                ptr[j] = best_i;
            }
            delta = next;
            back.push(ptr);
        }
        let mut last = 0;
        let mut best = f64::NEG_INFINITY;
        for (j, &d) in delta.iter().enumerate() {
            if d > best {
                best = d;
                last = j;
            }
        }
        let mut path = vec![last; t_len];
        for t in (1..t_len).rev() {
            path[t - 1] = back[t - 1][path[t]];
        }
        path
    }

    /// Negative log likelihood of the gold path plus its gradient with
    /// respect to the emissions; the transition gradient accumulates into
    /// `self.transitions.grad`. Gradients are marginals minus indicators.
    pub fn nll_backward(&mut self, emissions: &Array2<f64>, labels: &[usize]) -> (f64, Array2<f64>) {
        let t_len = emissions.nrows();
        let l = self.num_labels();
        assert_eq!(labels.len(), t_len, "label/emission length mismatch");
        if t_len == 0 {
            return (0.0, Array2::zeros((0, l)));
        }

        // forward (alpha) and backward (beta) log messages
        let mut alpha = Array2::zeros((t_len, l));
        for j in 0..l {
            alpha[[0, j]] = emissions[[0, j]];
        }
        for t in 1..t_len {
            for j in 0..l {
                let terms: Vec<f64> = (0..l)
                    .map(|i| alpha[[t - 1, i]] + self.transitions.value[[i, j]])
                    .collect();
                alpha[[t, j]] = log_sum_exp(&terms) + emissions[[t, j]];
            }
        }
        let mut beta = Array2::zeros((t_len, l));
        for t in (0..t_len - 1).rev() {
            for i in 0..l {
                let terms: Vec<f64> = (0..l)
                    .map(|j| {
                        self.transitions.value[[i, j]] + emissions[[t + 1, j]] + beta[[t + 1, j]]
                    })
                    .collect();
                beta[[t, i]] = log_sum_exp(&terms);
            }
        }
        let log_z = log_sum_exp(&(0..l).map(|j| alpha[[t_len - 1, j]]).collect::<Vec<_>>());

        let mut grad_em = Array2::zeros((t_len, l));
        for t in 0..t_len {
            for j in 0..l {
                grad_em[[t, j]] = (alpha[[t, j]] + beta[[t, j]] - log_z).exp();
            }
            grad_em[[t, labels[t]]] -= 1.0;
        }
        for t in 0..t_len - 1 {
            for i in 0..l {
                for j in 0..l {
                    let m = (alpha[[t, i]]
                        + self.transitions.value[[i, j]]
                        + emissions[[t + 1, j]]
                        + beta[[t + 1, j]]
                        - log_z)
                        .exp();
                    self.transitions.grad[[i, j]] += m;
                }
            }
            self.transitions.grad[[labels[t], labels[t + 1]]] -= 1.0;
        }

        let nll = log_z - self.path_score(emissions, labels);
        (nll, grad_em)
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        vec![&mut self.transitions]
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}
