use ndarray::{Array1, Array2, Axis};
use rand::Rng;

use super::param::Param;

/// Fully-connected layer over row vectors: `y = x W + b`.
#[derive(Debug, Clone)]
pub struct Linear {
    pub w: Param,
    pub b: Param,
}

pub struct LinearCache {
    input: Array2<f64>,
}

impl Linear {
    pub fn new<R: Rng>(input_dim: usize, output_dim: usize, rng: &mut R) -> Self {
        Linear {
            w: Param::xavier(input_dim, output_dim, rng),
            b: Param::zeros(1, output_dim),
        }
    }

    pub fn forward(&self, x: &Array2<f64>) -> (Array2<f64>, LinearCache) {
        let y = x.dot(&self.w.value) + &self.b.value;
        (y, LinearCache { input: x.clone() })
    }

    pub fn backward(&mut self, cache: &LinearCache, grad_out: &Array2<f64>) -> Array2<f64> {
        self.w.grad += &cache.input.t().dot(grad_out);
        self.b.grad += &grad_out.sum_axis(Axis(0)).insert_axis(Axis(0));
        grad_out.dot(&self.w.value.t())
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        vec![&mut self.w, &mut self.b]
    }
}

/// Fully-connected layer over multi-hot index lists; the matmul reduces
/// to summing active rows, and only touched rows receive gradient.
#[derive(Debug, Clone)]
pub struct SparseLinear {
    pub w: Param,
    pub b: Param,
}

pub struct SparseLinearCache {
    indices: Vec<Vec<usize>>,
}

impl SparseLinear {
    pub fn new<R: Rng>(input_dim: usize, output_dim: usize, rng: &mut R) -> Self {
        SparseLinear {
            w: Param::xavier(input_dim, output_dim, rng),
            b: Param::zeros(1, output_dim),
        }
    }

    /// `rows[t]` = sum of weight rows active in `indices[t]`, plus bias.
    pub fn forward(&self, indices: &[Vec<usize>]) -> (Array2<f64>, SparseLinearCache) {
        let out_dim = self.w.value.ncols();
        let mut y = Array2::zeros((indices.len(), out_dim));
        for (t, active) in indices.iter().enumerate() {
            let mut row = y.row_mut(t);
            row += &self.b.value.row(0);
            for &i in active {
                row += &self.w.value.row(i);
            }
        }
        (
            y,
            SparseLinearCache {
                indices: indices.to_vec(),
            },
        )
    }

    pub fn backward(&mut self, cache: &SparseLinearCache, grad_out: &Array2<f64>) {
        for (t, active) in cache.indices.iter().enumerate() {
            let g = grad_out.row(t);
            self.b.grad.row_mut(0).scaled_add(1.0, &g);
            for &i in active {
                self.w.grad.row_mut(i).scaled_add(1.0, &g);
            }
        }
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        vec![&mut self.w, &mut self.b]
    }
}

/// Per-row layer normalization with learned gain and bias.
#[derive(Debug, Clone)]
pub struct LayerNorm {
    pub gamma: Param,
    pub beta: Param,
    eps: f64,
}

pub struct LayerNormCache {
    normalized: Array2<f64>,
    inv_std: Array1<f64>,
}

impl LayerNorm {
    pub fn new(dim: usize) -> Self {
        LayerNorm {
            gamma: Param::ones(1, dim),
            beta: Param::zeros(1, dim),
            eps: 1e-5,
        }
    }

    pub fn forward(&self, x: &Array2<f64>) -> (Array2<f64>, LayerNormCache) {
        let d = x.ncols() as f64;
        let mean = x.mean_axis(Axis(1)).expect("non-empty rows");
        let mut centered = x.clone();
        for (mut row, &mu) in centered.rows_mut().into_iter().zip(mean.iter()) {
            row -= mu;
        }
        let var = centered.mapv(|v| v * v).sum_axis(Axis(1)) / d;
        let inv_std = var.mapv(|v| 1.0 / (v + self.eps).sqrt());
        let mut normalized = centered;
        for (mut row, &is) in normalized.rows_mut().into_iter().zip(inv_std.iter()) {
            row *= is;
        }
        let y = &normalized * &self.gamma.value + &self.beta.value;
        (
            y,
            LayerNormCache {
                normalized,
                inv_std,
            },
        )
    }

    pub fn backward(&mut self, cache: &LayerNormCache, grad_out: &Array2<f64>) -> Array2<f64> {
        let d = grad_out.ncols() as f64;
        self.gamma.grad += &(grad_out * &cache.normalized).sum_axis(Axis(0)).insert_axis(Axis(0));
        self.beta.grad += &grad_out.sum_axis(Axis(0)).insert_axis(Axis(0));

        // dL/dx = (1/std) * (g - mean(g) - normalized * mean(g * normalized))
        // with g = grad_out * gamma, means taken per row.
        let g = grad_out * &self.gamma.value;
        let mean_g = g.mean_axis(Axis(1)).expect("rows");
        let mean_gx = (&g * &cache.normalized).mean_axis(Axis(1)).expect("rows");
        let mut grad_in = g;
        for (((mut row, norm_row), (&mg, &mgx)), &is) in grad_in
            .rows_mut()
            .into_iter()
            .zip(cache.normalized.rows())
            .zip(mean_g.iter().zip(mean_gx.iter()))
            .zip(cache.inv_std.iter())
        {
            for (r, &nv) in row.iter_mut().zip(norm_row.iter()) {
                *r = (*r - mg - nv * mgx) * is;
            }
        }
        let _ = d;
        grad_in
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        vec![&mut self.gamma, &mut self.beta]
    }
}

/// ReLU with cached mask.
pub fn relu(x: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
    let mask = x.mapv(|v| if v > 0.0 { 1.0 } else { 0.0 });
    (x * &mask, mask)
}

pub fn relu_backward(mask: &Array2<f64>, grad_out: &Array2<f64>) -> Array2<f64> {
    grad_out * mask
}

/// Row-wise softmax.
pub fn softmax_rows(x: &Array2<f64>) -> Array2<f64> {
    let mut out = x.clone();
    for mut row in out.rows_mut() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum: f64 = row.sum();
        row /= sum;
    }
    out
}
