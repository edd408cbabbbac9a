use ndarray::{s, Array2};
use rand::Rng;

use super::layers::{softmax_rows, Linear, LinearCache};
use super::param::Param;

/// Multi-head self-attention over a `[T, d]` sequence, optionally causal.
#[derive(Debug, Clone)]
pub struct MultiHeadAttention {
    pub wq: Linear,
    pub wk: Linear,
    pub wv: Linear,
    pub wo: Linear,
    pub num_heads: usize,
    pub causal: bool,
}

pub struct AttentionCache {
    q_cache: LinearCache,
    k_cache: LinearCache,
    v_cache: LinearCache,
    o_cache: LinearCache,
    q: Array2<f64>,
    k: Array2<f64>,
    v: Array2<f64>,
    // per head: softmaxed attention weights [T, T]
    attn: Vec<Array2<f64>>,
}

impl MultiHeadAttention {
    pub fn new<R: Rng>(dim: usize, num_heads: usize, causal: bool, rng: &mut R) -> Self {
        assert!(dim % num_heads == 0, "dim must divide evenly into heads");
        MultiHeadAttention {
            wq: Linear::new(dim, dim, rng),
            wk: Linear::new(dim, dim, rng),
            wv: Linear::new(dim, dim, rng),
            wo: Linear::new(dim, dim, rng),
            num_heads,
            causal,
        }
    }

    pub fn forward(&self, x: &Array2<f64>) -> (Array2<f64>, AttentionCache) {
        let t = x.nrows();
        let d = x.ncols();
        let dh = d / self.num_heads;
        let scale = 1.0 / (dh as f64).sqrt();

        let (q, q_cache) = self.wq.forward(x);
        let (k, k_cache) = self.wk.forward(x);
        let (v, v_cache) = self.wv.forward(x);

        let mut concat = Array2::zeros((t, d));
        let mut attn_per_head = Vec::with_capacity(self.num_heads);
        for h in 0..self.num_heads {
            let cols = s![.., h * dh..(h + 1) * dh];
            let qh = q.slice(cols);
            let kh = k.slice(cols);
            let vh = v.slice(cols);
            let mut scores = qh.dot(&kh.t()) * scale;
            if self.causal {
                for i in 0..t {
                    for j in (i + 1)..t {
                        scores[[i, j]] = f64::NEG_INFINITY;
                    }
                }
            }
            let attn = softmax_rows(&scores);
            let out_h = attn.dot(&vh);
            concat.slice_mut(cols).assign(&out_h);
            attn_per_head.push(attn);
        }
        let (y, o_cache) = self.wo.forward(&concat);
        (
            y,
            AttentionCache {
                q_cache,
                k_cache,
                v_cache,
                o_cache,
                q,
                k,
                v,
                attn: attn_per_head,
            },
        )
    }

    pub fn backward(&mut self, cache: &AttentionCache, grad_out: &Array2<f64>) -> Array2<f64> {
        let t = grad_out.nrows();
        let d = grad_out.ncols();
        let dh = d / self.num_heads;
        let scale = 1.0 / (dh as f64).sqrt();

        let grad_concat = self.wo.backward(&cache.o_cache, grad_out);

        let mut grad_q = Array2::zeros((t, d));
        let mut grad_k = Array2::zeros((t, d));
        let mut grad_v = Array2::zeros((t, d));
        for h in 0..self.num_heads {
            let cols = s![.., h * dh..(h + 1) * dh];
            let attn = &cache.attn[h];
            let g_out_h = grad_concat.slice(cols);
            let qh = cache.q.slice(cols);
            let kh = cache.k.slice(cols);
            let vh = cache.v.slice(cols);

            // out_h = attn . vh
            let g_attn = g_out_h.dot(&vh.t());
            grad_v.slice_mut(cols).assign(&attn.t().dot(&g_out_h));

            // softmax backward per row: ds = a * (g - sum(g * a))
            let mut g_scores = Array2::zeros((t, t));
            for i in 0..t {
                let a = attn.row(i);
                let g = g_attn.row(i);
                let dot: f64 = a.iter().zip(g.iter()).map(|(av, gv)| av * gv).sum();
                for j in 0..t {
                    g_scores[[i, j]] = a[j] * (g[j] - dot);
                }
            }
            // scores = scale * qh . kh^T  (masked entries have zero
            // attention weight, hence zero score gradient)
            grad_q
                .slice_mut(cols)
                .assign(&(g_scores.dot(&kh) * scale));
            grad_k
                .slice_mut(cols)
                .assign(&(g_scores.t().dot(&qh) * scale));
        }

        let gx_q = self.wq.backward(&cache.q_cache, &grad_q);
        let gx_k = self.wk.backward(&cache.k_cache, &grad_k);
        let gx_v = self.wv.backward(&cache.v_cache, &grad_v);
        gx_q + gx_k + gx_v
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        let mut p = self.wq.params_mut();
        p.extend(self.wk.params_mut());
        p.extend(self.wv.params_mut());
        p.extend(self.wo.params_mut());
        p
    }
}
